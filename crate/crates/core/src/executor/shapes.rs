//! A small 3-D scene standing in for a modelling package.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{AdapterDescriptor, AppState, Arguments, ConditionKind, ExecError, HandlerMap, StateKind};

pub const ADAPTER_ID: &str = "shapes";
pub const DEFAULT_RADIUS: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub kind: String,
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SceneState {
    pub objects: Vec<SceneObject>,
}

fn scene(state: &mut AppState) -> Result<&mut SceneState, ExecError> {
    match state {
        AppState::Scene(s) => Ok(s),
        AppState::Editor(_) => Err(ExecError::TargetStateError("not a scene state".into())),
    }
}

fn create_shape(args: &Arguments, state: &mut AppState) -> Result<usize, ExecError> {
    let radius = args.params.get("radius").copied().unwrap_or(DEFAULT_RADIUS);
    if radius.is_nan() || radius <= 0.0 {
        return Err(ExecError::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    let s = scene(state)?;
    let kind = args.primary.concept.clone();
    let n = s.objects.iter().filter(|o| o.kind == kind).count() + 1;
    s.objects.push(SceneObject {
        name: format!("{kind}{n}"),
        kind,
        params: BTreeMap::from([("radius".to_owned(), radius)]),
    });
    Ok(1)
}

fn delete_shape(args: &Arguments, state: &mut AppState) -> Result<usize, ExecError> {
    let s = scene(state)?;
    let before = s.objects.len();
    s.objects.retain(|o| o.kind != args.primary.concept);
    match before - s.objects.len() {
        0 => Err(ExecError::TargetStateError(format!("no {} in the scene", args.primary.concept))),
        n => Ok(n),
    }
}

pub fn descriptor() -> AdapterDescriptor {
    let mut capabilities = BTreeMap::new();
    for kind in ["sphere", "cube"] {
        capabilities.insert((1020, kind.to_owned()), "create-shape".to_owned());
        capabilities.insert((1001, kind.to_owned()), "delete-shape".to_owned());
    }
    AdapterDescriptor {
        id: ADAPTER_ID.into(),
        state: StateKind::Scene,
        capabilities,
        concepts: BTreeMap::from([(2040, "sphere".to_owned()), (2042, "cube".to_owned())]),
        conditions: BTreeMap::from([(3020, ConditionKind::Param("radius".into()))]),
    }
}

pub fn handlers() -> HandlerMap {
    let mut map = HandlerMap::new();
    map.insert("create-shape".into(), Arc::new(create_shape));
    map.insert("delete-shape".into(), Arc::new(delete_shape));
    map
}
