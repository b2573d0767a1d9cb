//! Line-oriented model files.
//!
//! ```text
//! # comments start with '#'
//! worlds: w1 w2 w3
//! event a = {w1}
//! event e = a & !b v c
//! layer: w1=1/3 w2=1/3 w3=1/3
//! ```
//!
//! `worlds:` comes first and appears once. `layer:` lines may repeat; their
//! order is the layer order. Without any `layer:` line the model uses the
//! uniform distribution.

use std::fmt;

use thiserror::Error;

use crate::event::{EventError, WorldSpace};
use crate::parse::{is_identifier, EventScope, ParseError};
use crate::probability::{ConditionalProbability, ProbabilityError};
use crate::rational::{self, Rational};
use crate::term::CondTerm;

const RESERVED: [&str; 5] = ["TOP", "BOT", "TRUE", "FALSE", "v"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelErrorKind {
    Syntax(String),
    Expression(ParseError),
    Worlds(EventError),
    Probability(ProbabilityError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ModelError {
    pub line: usize,
    pub kind: ModelErrorKind,
}

impl ModelError {
    pub fn is_syntax(&self) -> bool {
        match &self.kind {
            ModelErrorKind::Syntax(_) => true,
            ModelErrorKind::Expression(e) => e.is_syntax(),
            ModelErrorKind::Worlds(_) | ModelErrorKind::Probability(_) => false,
        }
    }
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ", self.line)?;
        match &self.kind {
            ModelErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ModelErrorKind::Expression(e) => write!(f, "{e}"),
            ModelErrorKind::Worlds(e) => write!(f, "{e}"),
            ModelErrorKind::Probability(e) => write!(f, "{e}"),
        }
    }
}

/// A parsed model: worlds, named events and a conditional probability.
#[derive(Debug, Clone)]
pub struct Model {
    scope: EventScope,
    cp: ConditionalProbability,
}

impl Model {
    pub fn new(scope: EventScope, cp: ConditionalProbability) -> Self {
        assert!(scope.space() == cp.space(), "scope and probability share a space");
        Model { scope, cp }
    }

    pub fn space(&self) -> &WorldSpace {
        self.scope.space()
    }

    pub fn scope(&self) -> &EventScope {
        &self.scope
    }

    pub fn cp(&self) -> &ConditionalProbability {
        &self.cp
    }

    pub fn term(&self, text: &str) -> Result<CondTerm, ParseError> {
        self.scope.parse_term(text)
    }

    pub fn render(&self, t: &CondTerm) -> String {
        self.scope.render(t)
    }

    pub fn parse(text: &str) -> Result<Model, ModelError> {
        let mut scope: Option<EventScope> = None;
        let mut layers: Vec<(usize, Vec<(usize, Rational)>)> = Vec::new();
        let mut last_line = 0;

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let err = |kind| ModelError { line, kind };
            let syntax = |msg: String| ModelError { line, kind: ModelErrorKind::Syntax(msg) };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix("worlds:") {
                if scope.is_some() {
                    return Err(syntax("worlds declared twice".into()));
                }
                let names: Vec<&str> = rest.split_whitespace().collect();
                if let Some(bad) = names.iter().find(|n| !is_identifier(n) || RESERVED.contains(n)) {
                    return Err(syntax(format!("invalid world name {bad:?}")));
                }
                let space = WorldSpace::new(names).map_err(|e| err(ModelErrorKind::Worlds(e)))?;
                scope = Some(EventScope::new(&space));
                continue;
            }
            let Some(sc) = scope.as_mut() else {
                return Err(syntax("expected 'worlds:' before anything else".into()));
            };
            if let Some(rest) = content.strip_prefix("event ") {
                let (name, expr) = rest
                    .split_once('=')
                    .ok_or_else(|| syntax("expected 'event NAME = EXPRESSION'".into()))?;
                let name = name.trim();
                if !is_identifier(name) || RESERVED.contains(&name) {
                    return Err(syntax(format!("invalid event name {name:?}")));
                }
                if sc.get(name).is_some() {
                    return Err(syntax(format!("event {name:?} defined twice")));
                }
                let event = sc.parse_event(expr).map_err(|e| {
                    let offset = raw[..expr.as_ptr() as usize - raw.as_ptr() as usize].chars().count();
                    err(ModelErrorKind::Expression(ParseError { kind: e.kind, column: e.column + offset }))
                })?;
                sc.define(name, event);
            } else if let Some(rest) = content.strip_prefix("layer:") {
                let mut entries = Vec::new();
                for item in rest.split_whitespace() {
                    let (world, weight) = item
                        .split_once('=')
                        .ok_or_else(|| syntax(format!("expected WORLD=WEIGHT, found {item:?}")))?;
                    let w = sc
                        .space()
                        .world(world)
                        .ok_or_else(|| err(ModelErrorKind::Worlds(EventError::UnknownWorld(world.to_string()))))?;
                    let weight =
                        rational::parse(weight).ok_or_else(|| syntax(format!("invalid weight {weight:?}")))?;
                    entries.push((w, weight));
                }
                layers.push((line, entries));
            } else {
                return Err(syntax(format!("unrecognized line {content:?}")));
            }
        }

        let scope = scope.ok_or_else(|| ModelError {
            line: last_line.max(1),
            kind: ModelErrorKind::Syntax("missing 'worlds:' declaration".into()),
        })?;
        let cp = if layers.is_empty() {
            ConditionalProbability::uniform(scope.space())
        } else {
            let first_line = layers[0].0;
            let lines: Vec<usize> = layers.iter().map(|(l, _)| *l).collect();
            ConditionalProbability::new(scope.space(), layers.into_iter().map(|(_, e)| e).collect()).map_err(|e| {
                let line = match &e {
                    ProbabilityError::EmptyLayer(i)
                    | ProbabilityError::NonPositive { layer: i, .. }
                    | ProbabilityError::NotNormalized { layer: i, .. } => lines[*i],
                    _ => first_line,
                };
                ModelError { line, kind: ModelErrorKind::Probability(e) }
            })?
        };
        Ok(Model { scope, cp })
    }
}
