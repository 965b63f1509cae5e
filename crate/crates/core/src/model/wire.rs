//! JSON wire format.
//!
//! Decoding is done by hand over `serde_json::Value` so that schema errors
//! carry the exact path of the offending value and every unknown key lands in
//! the owning object's extension map. Encoding goes through the derived
//! `Serialize` impls, whose field order is the canonical key order.

use std::collections::BTreeSet;

use serde_json::{Map, Value};
use thiserror::Error;

use super::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
}

impl ParseError {
    pub fn path(&self) -> Option<&str> {
        match self {
            ParseError::Syntax { .. } => None,
            ParseError::Schema { path, .. } => Some(path),
        }
    }

    fn schema(path: &str, message: impl Into<String>) -> Self {
        ParseError::Schema {
            path: if path.is_empty() { "$".to_string() } else { path.to_string() },
            message: message.into(),
        }
    }
}

pub fn parse_model(text: &str) -> Result<DashboardModel, ParseError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    model_from_value(&value)
}

/// Canonical encoding: fixed key order, two-space indent, trailing newline.
pub fn serialize_model(model: &DashboardModel) -> String {
    let mut out = serde_json::to_string_pretty(model).expect("model serializes to JSON");
    out.push('\n');
    out
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

/// Reads the known keys of one JSON object; whatever is left over becomes the
/// extension map.
struct Fields<'v> {
    map: &'v Map<String, Value>,
    path: String,
    known: Vec<&'static str>,
}

impl<'v> Fields<'v> {
    fn new(value: &'v Value, path: &str) -> Result<Self, ParseError> {
        let map = value
            .as_object()
            .ok_or_else(|| ParseError::schema(path, format!("expected object, found {}", kind(value))))?;
        Ok(Fields {
            map,
            path: path.to_string(),
            known: Vec::new(),
        })
    }

    /// Absent keys and explicit nulls both read as `None`.
    fn optional(&mut self, key: &'static str) -> Option<(&'v Value, String)> {
        self.known.push(key);
        match self.map.get(key) {
            None | Some(Value::Null) => None,
            Some(v) => Some((v, join(&self.path, key))),
        }
    }

    fn required(&mut self, key: &'static str) -> Result<(&'v Value, String), ParseError> {
        self.optional(key)
            .ok_or_else(|| ParseError::schema(&join(&self.path, key), "missing required key"))
    }

    fn extensions(self) -> Extensions {
        self.map
            .iter()
            .filter(|(k, _)| !self.known.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

fn string(v: &Value, path: &str) -> Result<String, ParseError> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| ParseError::schema(path, format!("expected string, found {}", kind(v))))
}

fn boolean(v: &Value, path: &str) -> Result<bool, ParseError> {
    v.as_bool()
        .ok_or_else(|| ParseError::schema(path, format!("expected boolean, found {}", kind(v))))
}

fn number(v: &Value, path: &str) -> Result<f64, ParseError> {
    v.as_f64()
        .ok_or_else(|| ParseError::schema(path, format!("expected number, found {}", kind(v))))
}

fn unsigned(v: &Value, path: &str) -> Result<u64, ParseError> {
    v.as_u64().ok_or_else(|| {
        ParseError::schema(path, format!("expected non-negative integer, found {v}"))
    })
}

fn grid_unit(v: &Value, path: &str) -> Result<u32, ParseError> {
    let n = unsigned(v, path)?;
    u32::try_from(n).map_err(|_| ParseError::schema(path, format!("grid coordinate {n} too large")))
}

fn array<'v>(v: &'v Value, path: &str) -> Result<&'v Vec<Value>, ParseError> {
    v.as_array()
        .ok_or_else(|| ParseError::schema(path, format!("expected array, found {}", kind(v))))
}

fn strings(v: &Value, path: &str) -> Result<Vec<String>, ParseError> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, item)| string(item, &index(path, i)))
        .collect()
}

fn enumerated<T>(v: &Value, path: &str, parse: impl FnOnce(&str) -> Result<T, String>) -> Result<T, ParseError> {
    let s = string(v, path)?;
    parse(&s).map_err(|msg| ParseError::schema(path, msg))
}

pub fn model_from_value(value: &Value) -> Result<DashboardModel, ParseError> {
    let mut f = Fields::new(value, "")?;
    let (v, p) = f.required("id")?;
    let id = string(v, &p)?;
    let (v, p) = f.required("name")?;
    let name = string(v, &p)?;
    let (v, p) = f.required("theme")?;
    let theme = enumerated(v, &p, str::parse)?;
    let base_data_model = match f.optional("baseDataModel") {
        Some((v, p)) => Some(string(v, &p)?),
        None => None,
    };
    let revision = match f.optional("revision") {
        Some((v, p)) => unsigned(v, &p)?,
        None => 0,
    };
    let (v, p) = f.required("pages")?;
    let pages = array(v, &p)?
        .iter()
        .enumerate()
        .map(|(i, page)| page_from_value(page, &index(&p, i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DashboardModel {
        id,
        name,
        theme,
        base_data_model,
        revision,
        pages,
        extensions: f.extensions(),
    })
}

fn page_from_value(value: &Value, path: &str) -> Result<Page, ParseError> {
    let mut f = Fields::new(value, path)?;
    let (v, p) = f.required("id")?;
    let id = string(v, &p)?;
    let (v, p) = f.required("name")?;
    let name = string(v, &p)?;
    let widgets = match f.optional("widgets") {
        Some((v, p)) => array(v, &p)?
            .iter()
            .enumerate()
            .map(|(i, w)| widget_from_value(w, &index(&p, i)))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    Ok(Page {
        id,
        name,
        widgets,
        extensions: f.extensions(),
    })
}

fn widget_from_value(value: &Value, path: &str) -> Result<Widget, ParseError> {
    let mut f = Fields::new(value, path)?;
    let (v, p) = f.required("id")?;
    let id = string(v, &p)?;
    let name = match f.optional("name") {
        Some((v, p)) => Some(string(v, &p)?),
        None => None,
    };
    let metric_id = match f.optional("metricId") {
        Some((v @ Value::Array(_), p)) => Some(MetricBinding::Multiple(strings(v, &p)?)),
        Some((v, p)) => Some(MetricBinding::Single(string(v, &p)?)),
        None => None,
    };
    let (v, p) = f.required("properties")?;
    let properties = properties_from_value(v, &p)?;
    let (v, p) = f.required("layout")?;
    let (layout, layout_extensions) = layout_from_value(v, &p)?;
    let visconfig = match f.optional("visconfig") {
        Some((v, p)) => Some(visconfig_from_value(v, &p)?),
        None => None,
    };
    let interaction = match f.optional("interaction") {
        Some((v, p)) => Some(interaction_from_value(v, &p)?),
        None => None,
    };
    Ok(Widget {
        id,
        name,
        metric_id,
        properties,
        layout,
        layout_extensions,
        visconfig,
        interaction,
        extensions: f.extensions(),
    })
}

fn properties_from_value(value: &Value, path: &str) -> Result<VisProperties, ParseError> {
    let mut f = Fields::new(value, path)?;
    let (v, p) = f.required("vistype")?;
    let vistype = enumerated(v, &p, str::parse)?;
    let title = match f.optional("title") {
        Some((v, p)) => Some(string(v, &p)?),
        None => None,
    };
    let childrenname = match f.optional("childrenname") {
        Some((v, p)) => Some(strings(v, &p)?),
        None => None,
    };
    Ok(VisProperties {
        vistype,
        title,
        childrenname,
        extensions: f.extensions(),
    })
}

fn layout_from_value(value: &Value, path: &str) -> Result<(LayoutRect, Extensions), ParseError> {
    let mut f = Fields::new(value, path)?;
    let mut unit = |key: &'static str| -> Result<u32, ParseError> {
        let (v, p) = f.required(key)?;
        grid_unit(v, &p)
    };
    let rect = LayoutRect {
        w: unit("w")?,
        h: unit("h")?,
        x: unit("x")?,
        y: unit("y")?,
    };
    Ok((rect, f.extensions()))
}

fn visconfig_from_value(value: &Value, path: &str) -> Result<VisConfig, ParseError> {
    let mut f = Fields::new(value, path)?;
    let colour = match f.optional("colour") {
        Some((v, p)) => Some(strings(v, &p)?),
        None => None,
    };
    let legend_disabled = match f.optional("legendDisabled") {
        Some((v, p)) => Some(boolean(v, &p)?),
        None => None,
    };
    let legend_position = match f.optional("legendPosition") {
        Some((v, p)) => Some(enumerated(v, &p, str::parse)?),
        None => None,
    };
    let baseline = match f.optional("baseline") {
        Some((v, p)) => Some(enumerated(v, &p, str::parse)?),
        None => None,
    };
    let font_size = match f.optional("fontSize") {
        Some((v, p)) => Some(number(v, &p)?),
        None => None,
    };
    let axis_label_disabled = match f.optional("axisLabelDisabled") {
        Some((v, p)) => Some(boolean(v, &p)?),
        None => None,
    };
    Ok(VisConfig {
        colour,
        legend_disabled,
        legend_position,
        baseline,
        font_size,
        axis_label_disabled,
        extensions: f.extensions(),
    })
}

fn interaction_from_value(value: &Value, path: &str) -> Result<InteractionSpec, ParseError> {
    let mut f = Fields::new(value, path)?;
    let interactions = match f.optional("interactions") {
        Some((v, p)) => array(v, &p)?
            .iter()
            .enumerate()
            .map(|(i, item)| {
                let ip = index(&p, i);
                enumerated(item, &ip, |s| {
                    InteractionType::parse(s).ok_or_else(|| format!("unknown interaction `{s}`"))
                })
            })
            .collect::<Result<BTreeSet<_>, _>>()?,
        None => BTreeSet::new(),
    };
    let detail = match f.optional("detail") {
        Some((v, p)) => Some(detail_from_value(v, &p)?),
        None => None,
    };
    Ok(InteractionSpec {
        interactions,
        detail,
        extensions: f.extensions(),
    })
}

fn detail_from_value(value: &Value, path: &str) -> Result<DetailConfig, ParseError> {
    let mut f = Fields::new(value, path)?;
    let (v, p) = f.required("target")?;
    let target = string(v, &p)?;
    let method = match f.optional("method") {
        Some((v, p)) => enumerated(v, &p, str::parse)?,
        None => PageMode::Full,
    };
    Ok(DetailConfig {
        target,
        method,
        extensions: f.extensions(),
    })
}
