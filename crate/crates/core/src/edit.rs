//! Customization edits as validated model transformations.
//!
//! Every edit returns a new model with `revision + 1`; the input is never
//! touched. The result must pass [`validate_model`], otherwise the edit is
//! rejected with the id of the first violated rule.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::layout::{self, LayoutError};
use crate::model::{
    validate_model, DashboardModel, DetailConfig, InteractionSpec, InteractionType, LayoutRect, LegendPosition,
    MetricBinding, Page, PageMode, Theme, VisType, Widget,
};
use crate::model::{Baseline, Extensions};

/// Target of dashboard-level edits (the dashboard id is accepted too).
pub const DASHBOARD_TARGET: &str = "dashboard";
/// Size of a freshly inserted widget.
pub const NEW_WIDGET_SIZE: (u32, u32) = (4, 8);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EditCommand {
    #[serde(flatten)]
    pub op: EditOp,
    pub target: String,
}

impl EditCommand {
    pub fn new(target: impl Into<String>, op: EditOp) -> Self {
        EditCommand {
            op,
            target: target.into(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn kind(&self) -> &'static str {
        self.op.kind()
    }
}

// A missing `payload` reads as `{}` so field-less kinds need none.
impl<'de> Deserialize<'de> for EditCommand {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            kind: String,
            target: String,
            #[serde(default)]
            payload: Option<Value>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let payload = raw.payload.unwrap_or_else(|| Value::Object(Default::default()));
        let op = EditOp::deserialize(serde_json::json!({ "kind": raw.kind, "payload": payload }))
            .map_err(serde::de::Error::custom)?;
        Ok(EditCommand { op, target: raw.target })
    }
}

/// Parse a script: a JSON array of commands.
pub fn parse_edit_script(text: &str) -> Result<Vec<EditCommand>, serde_json::Error> {
    serde_json::from_str(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectPayload {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl From<RectPayload> for LayoutRect {
    fn from(r: RectPayload) -> Self {
        LayoutRect::new(r.x, r.y, r.w, r.h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "camelCase")]
pub enum EditOp {
    RenameDashboard {
        name: String,
    },
    SetTheme {
        theme: String,
    },
    #[serde(rename_all = "camelCase")]
    SetBaseDataModel {
        #[serde(default)]
        base_data_model: Option<String>,
    },
    #[serde(rename_all = "camelCase")]
    SwitchModel {
        dashboard_id: String,
    },
    NewPage {
        #[serde(default)]
        id: Option<String>,
        name: String,
    },
    RenamePage {
        name: String,
    },
    SetPageLayout {
        layout: BTreeMap<String, RectPayload>,
    },
    #[serde(rename_all = "camelCase")]
    NewWidget {
        vistype: String,
        #[serde(default)]
        id: Option<String>,
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        metric_id: Option<Value>,
        #[serde(default)]
        childrenname: Option<Vec<String>>,
    },
    RenameWidget {
        name: String,
    },
    SetVisType {
        vistype: String,
    },
    Resize {
        w: u32,
        h: u32,
    },
    Move {
        x: u32,
        y: u32,
    },
    SetColor {
        #[serde(default)]
        colour: Option<Vec<String>>,
    },
    #[serde(rename_all = "camelCase")]
    SetMetricId {
        #[serde(default)]
        metric_id: Option<Value>,
    },
    #[serde(rename_all = "camelCase")]
    SetElementLayout {
        #[serde(default)]
        legend_position: Option<String>,
        #[serde(default)]
        axis_label_disabled: Option<bool>,
    },
    SetLegendDisabled {
        disabled: bool,
    },
    SetLegendPosition {
        position: String,
    },
    SetBaseline {
        baseline: String,
    },
    #[serde(rename_all = "camelCase")]
    SetFontSize {
        #[serde(default)]
        font_size: Option<f64>,
    },
    SetAxisLabelDisabled {
        disabled: bool,
    },
    SetInteractions {
        interactions: Vec<String>,
    },
    /// Detail-on-demand destination.
    ConfigureInteraction {
        page: String,
        #[serde(default)]
        method: Option<String>,
    },
    DeleteWidget {},
    DeletePage {},
}

impl EditOp {
    pub const KINDS: [&'static str; 24] = [
        "renameDashboard",
        "setTheme",
        "setBaseDataModel",
        "switchModel",
        "newPage",
        "renamePage",
        "setPageLayout",
        "newWidget",
        "renameWidget",
        "setVisType",
        "resize",
        "move",
        "setColor",
        "setMetricId",
        "setElementLayout",
        "setLegendDisabled",
        "setLegendPosition",
        "setBaseline",
        "setFontSize",
        "setAxisLabelDisabled",
        "setInteractions",
        "configureInteraction",
        "deleteWidget",
        "deletePage",
    ];

    pub fn kind(&self) -> &'static str {
        let i = match self {
            EditOp::RenameDashboard { .. } => 0,
            EditOp::SetTheme { .. } => 1,
            EditOp::SetBaseDataModel { .. } => 2,
            EditOp::SwitchModel { .. } => 3,
            EditOp::NewPage { .. } => 4,
            EditOp::RenamePage { .. } => 5,
            EditOp::SetPageLayout { .. } => 6,
            EditOp::NewWidget { .. } => 7,
            EditOp::RenameWidget { .. } => 8,
            EditOp::SetVisType { .. } => 9,
            EditOp::Resize { .. } => 10,
            EditOp::Move { .. } => 11,
            EditOp::SetColor { .. } => 12,
            EditOp::SetMetricId { .. } => 13,
            EditOp::SetElementLayout { .. } => 14,
            EditOp::SetLegendDisabled { .. } => 15,
            EditOp::SetLegendPosition { .. } => 16,
            EditOp::SetBaseline { .. } => 17,
            EditOp::SetFontSize { .. } => 18,
            EditOp::SetAxisLabelDisabled { .. } => 19,
            EditOp::SetInteractions { .. } => 20,
            EditOp::ConfigureInteraction { .. } => 21,
            EditOp::DeleteWidget {} => 22,
            EditOp::DeletePage {} => 23,
        };
        Self::KINDS[i]
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EditError {
    #[error("target `{0}` not found")]
    TargetNotFound(String),
    #[error("invalid payload ({rule}): {message}")]
    InvalidPayload { rule: String, message: String },
    #[error("illegal edit: {0}")]
    IllegalEdit(String),
}

impl EditError {
    fn payload(rule: &str, message: impl Into<String>) -> Self {
        EditError::InvalidPayload {
            rule: rule.to_string(),
            message: message.into(),
        }
    }

    /// Rule id carried by an invalid-payload error.
    pub fn rule(&self) -> Option<&str> {
        match self {
            EditError::InvalidPayload { rule, .. } => Some(rule),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("edit {index} failed: {error}")]
pub struct ScriptError {
    pub index: usize,
    pub error: EditError,
}

fn parse_with<T: FromStr>(rule: &str, text: &str) -> Result<T, EditError>
where
    T::Err: ToString,
{
    text.parse::<T>().map_err(|e| EditError::payload(rule, e.to_string()))
}

fn parse_binding(value: Option<Value>) -> Result<Option<MetricBinding>, EditError> {
    match value {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(MetricBinding::Single(s))),
        Some(Value::Array(items)) => items
            .into_iter()
            .map(|v| match v {
                Value::String(s) => Ok(s),
                other => Err(EditError::payload("BAD_METRIC_ID", format!("metric id must be a string, got {other}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|ids| Some(MetricBinding::Multiple(ids))),
        Some(other) => Err(EditError::payload(
            "BAD_METRIC_ID",
            format!("metricId must be a string or list of strings, got {other}"),
        )),
    }
}

fn layout_error(e: LayoutError) -> EditError {
    match e {
        LayoutError::UnknownWidget(id) => EditError::TargetNotFound(id),
        LayoutError::OutOfBounds(r) if r.w < 1 || r.h < 1 => {
            EditError::payload("LAYOUT_EXTENT", format!("{r} has an empty extent"))
        }
        LayoutError::OutOfBounds(r) => EditError::payload("LAYOUT_BOUNDS", format!("{r} leaves the grid")),
        e @ LayoutError::Conflict { .. } => EditError::payload("OVERLAP", e.to_string()),
    }
}

/// Smallest `p{page}-i{n}` not used anywhere in the model.
fn fresh_widget_id(model: &DashboardModel, page_index: usize) -> String {
    (0..)
        .map(|n| format!("p{page_index}-i{n}"))
        .find(|id| model.widget(id).is_none())
        .expect("unbounded search")
}

fn fresh_page_id(model: &DashboardModel) -> String {
    (0..)
        .map(|n: u64| n.to_string())
        .find(|id| model.page(id).is_none())
        .expect("unbounded search")
}

/// Apply one edit, returning the new model.
pub fn apply_edit(model: &DashboardModel, cmd: &EditCommand) -> Result<DashboardModel, EditError> {
    let mut m = model.clone();
    let target = cmd.target.as_str();

    let dashboard = |m: &DashboardModel| -> Result<(), EditError> {
        if target == DASHBOARD_TARGET || target == m.id {
            Ok(())
        } else {
            Err(EditError::TargetNotFound(target.to_string()))
        }
    };
    let page_of = |m: &DashboardModel| -> Result<usize, EditError> {
        m.page_index(target)
            .ok_or_else(|| EditError::TargetNotFound(target.to_string()))
    };
    let widget_of = |m: &DashboardModel| -> Result<(usize, usize), EditError> {
        m.find_widget(target)
            .ok_or_else(|| EditError::TargetNotFound(target.to_string()))
    };

    match cmd.op.clone() {
        EditOp::RenameDashboard { name } => {
            dashboard(&m)?;
            m.name = name;
        }
        EditOp::SetTheme { theme } => {
            dashboard(&m)?;
            m.theme = parse_with::<Theme>("BAD_THEME", &theme)?;
        }
        EditOp::SetBaseDataModel { base_data_model } => {
            dashboard(&m)?;
            m.base_data_model = base_data_model;
        }
        EditOp::SwitchModel { .. } => {
            return Err(EditError::IllegalEdit(
                "switchModel selects a different dashboard and is handled by the service".into(),
            ));
        }
        EditOp::NewPage { id, name } => {
            dashboard(&m)?;
            let id = id.unwrap_or_else(|| fresh_page_id(&m));
            m.pages.push(Page {
                id,
                name,
                widgets: Vec::new(),
                extensions: Extensions::new(),
            });
        }
        EditOp::RenamePage { name } => {
            let p = page_of(&m)?;
            m.pages[p].name = name;
        }
        EditOp::SetPageLayout { layout } => {
            let p = page_of(&m)?;
            let page = &mut m.pages[p];
            for id in layout.keys() {
                if page.widget(id).is_none() {
                    return Err(EditError::TargetNotFound(id.clone()));
                }
            }
            for widget in &mut page.widgets {
                if let Some(rect) = layout.get(&widget.id) {
                    widget.layout = (*rect).into();
                }
            }
        }
        EditOp::NewWidget {
            vistype,
            id,
            name,
            metric_id,
            childrenname,
        } => {
            let p = page_of(&m)?;
            let vistype = parse_with::<VisType>("BAD_VISTYPE", &vistype)?;
            let id = id.unwrap_or_else(|| fresh_widget_id(&m, p));
            let (w, h) = NEW_WIDGET_SIZE;
            let mut widget = Widget::new(id, vistype, LayoutRect::new(0, m.pages[p].bottom(), w, h));
            widget.name = name;
            widget.metric_id = parse_binding(metric_id)?;
            widget.properties.childrenname = childrenname;
            m.pages[p].widgets.push(widget);
        }
        EditOp::RenameWidget { name } => {
            let (p, w) = widget_of(&m)?;
            m.pages[p].widgets[w].name = Some(name);
        }
        EditOp::SetVisType { vistype } => {
            let (p, w) = widget_of(&m)?;
            m.pages[p].widgets[w].properties.vistype = parse_with("BAD_VISTYPE", &vistype)?;
        }
        EditOp::Resize { w, h } => {
            let (p, _) = widget_of(&m)?;
            m.pages[p] = layout::resize_widget(&m.pages[p], target, w, h).map_err(layout_error)?;
        }
        EditOp::Move { x, y } => {
            let (p, _) = widget_of(&m)?;
            m.pages[p] = layout::move_widget(&m.pages[p], target, x, y).map_err(layout_error)?;
        }
        EditOp::SetColor { colour } => {
            let (p, w) = widget_of(&m)?;
            m.pages[p].widgets[w].visconfig_mut().colour = colour;
        }
        EditOp::SetMetricId { metric_id } => {
            let (p, w) = widget_of(&m)?;
            m.pages[p].widgets[w].metric_id = parse_binding(metric_id)?;
        }
        EditOp::SetElementLayout {
            legend_position,
            axis_label_disabled,
        } => {
            let (p, w) = widget_of(&m)?;
            let position = legend_position
                .map(|s| parse_with::<LegendPosition>("BAD_LEGEND_POSITION", &s))
                .transpose()?;
            let config = m.pages[p].widgets[w].visconfig_mut();
            if position.is_some() {
                config.legend_position = position;
            }
            if axis_label_disabled.is_some() {
                config.axis_label_disabled = axis_label_disabled;
            }
        }
        EditOp::SetLegendDisabled { disabled } => {
            let (p, w) = widget_of(&m)?;
            m.pages[p].widgets[w].visconfig_mut().legend_disabled = Some(disabled);
        }
        EditOp::SetLegendPosition { position } => {
            let (p, w) = widget_of(&m)?;
            m.pages[p].widgets[w].visconfig_mut().legend_position =
                Some(parse_with("BAD_LEGEND_POSITION", &position)?);
        }
        EditOp::SetBaseline { baseline } => {
            let (p, w) = widget_of(&m)?;
            m.pages[p].widgets[w].visconfig_mut().baseline = Some(parse_with::<Baseline>("BAD_BASELINE", &baseline)?);
        }
        EditOp::SetFontSize { font_size } => {
            let (p, w) = widget_of(&m)?;
            m.pages[p].widgets[w].visconfig_mut().font_size = font_size;
        }
        EditOp::SetAxisLabelDisabled { disabled } => {
            let (p, w) = widget_of(&m)?;
            m.pages[p].widgets[w].visconfig_mut().axis_label_disabled = Some(disabled);
        }
        EditOp::SetInteractions { interactions } => {
            let (p, w) = widget_of(&m)?;
            let kinds = interactions
                .iter()
                .map(|s| {
                    InteractionType::parse(s)
                        .ok_or_else(|| EditError::payload("BAD_INTERACTION", format!("unknown interaction `{s}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let widget = &mut m.pages[p].widgets[w];
            match &mut widget.interaction {
                Some(spec) => spec.interactions = kinds.into_iter().collect(),
                None if kinds.is_empty() => {}
                None => widget.interaction = Some(InteractionSpec::new(kinds)),
            }
            // An empty spec with no detail and no extras carries nothing.
            if widget
                .interaction
                .as_ref()
                .is_some_and(|s| s.interactions.is_empty() && s.detail.is_none() && s.extensions.is_empty())
            {
                widget.interaction = None;
            }
        }
        EditOp::ConfigureInteraction { page, method } => {
            let (p, w) = widget_of(&m)?;
            let method = method
                .map(|s| parse_with::<PageMode>("BAD_METHOD", &s))
                .transpose()?
                .unwrap_or_default();
            let spec = m.pages[p].widgets[w]
                .interaction
                .get_or_insert_with(|| InteractionSpec::new([InteractionType::DetailOnDemand]));
            spec.interactions.insert(InteractionType::DetailOnDemand);
            spec.detail = Some(DetailConfig::new(page, method));
        }
        EditOp::DeleteWidget {} => {
            let (p, w) = widget_of(&m)?;
            m.pages[p].widgets.remove(w);
        }
        EditOp::DeletePage {} => {
            let p = page_of(&m)?;
            if m.pages.len() == 1 {
                return Err(EditError::IllegalEdit("a dashboard must keep at least one page".into()));
            }
            m.pages.remove(p);
        }
    }

    let report = validate_model(&m);
    if let Some(v) = report.violations.first() {
        return Err(EditError::InvalidPayload {
            rule: v.rule.as_str().to_string(),
            message: format!("{} {}", v.path, v.message),
        });
    }
    m.revision = model.revision + 1;
    Ok(m)
}

/// Left fold of [`apply_edit`]; on failure nothing is applied.
pub fn apply_edit_script(model: &DashboardModel, cmds: &[EditCommand]) -> Result<DashboardModel, ScriptError> {
    let mut current = model.clone();
    for (index, cmd) in cmds.iter().enumerate() {
        current = apply_edit(&current, cmd).map_err(|error| ScriptError { index, error })?;
    }
    Ok(current)
}
