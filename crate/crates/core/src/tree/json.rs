//! JSON model format:
//!
//! ```text
//! {"n_features": int, "base_score": float,
//!  "trees": [{"nodes": [{"feature", "threshold", "left", "right", "left_fraction"} | {"value"}]}]}
//! ```

use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

use super::{Tree, TreeEnsemble, TreeNode};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn save_ensemble_json<T: Real>(e: &TreeEnsemble<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut text = ensemble_to_json(e)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_ensemble_json<T: Real>(path: impl AsRef<Path>) -> Result<TreeEnsemble<T>> {
    ensemble_from_json(&fs::read_to_string(path)?)
}

pub fn ensemble_to_json<T: Real>(e: &TreeEnsemble<T>) -> Result<String> {
    // refuse to write anything the loader would reject
    let checked = TreeEnsemble::new(e.n_features, e.base_score, e.trees.clone())?;
    Ok(serde_json::to_string_pretty(&checked)?)
}

pub fn ensemble_from_json<T: Real>(text: &str) -> Result<TreeEnsemble<T>> {
    let root: Value = serde_json::from_str(text)?;
    let obj = as_object(&root, "$")?;
    let n_features = get_usize(obj, "n_features", "$")?;
    let base_score = get_real(obj, "base_score", "$")?;
    let trees_v = obj
        .get("trees")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::schema("$", "missing array field 'trees'"))?;
    let mut trees = Vec::with_capacity(trees_v.len());
    for (t, tv) in trees_v.iter().enumerate() {
        let tpath = format!("trees[{t}]");
        let nodes_v = as_object(tv, &tpath)?
            .get("nodes")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::schema(&tpath, "missing array field 'nodes'"))?;
        let nodes = nodes_v
            .iter()
            .enumerate()
            .map(|(i, nv)| parse_node(nv, &format!("{tpath}.nodes[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        trees.push(Tree { nodes });
    }
    TreeEnsemble::new(n_features, base_score, trees)
}

fn parse_node<T: Real>(v: &Value, path: &str) -> Result<TreeNode<T>> {
    let obj = as_object(v, path)?;
    if obj.contains_key("value") {
        if let Some(extra) = obj.keys().find(|k| *k != "value") {
            return Err(Error::schema(path, format!("leaf has unexpected field '{extra}'")));
        }
        return Ok(TreeNode::Leaf {
            value: get_real(obj, "value", path)?,
        });
    }
    Ok(TreeNode::Split {
        feature: get_usize(obj, "feature", path)?,
        threshold: get_real(obj, "threshold", path)?,
        left: get_usize(obj, "left", path)?,
        right: get_usize(obj, "right", path)?,
        left_fraction: get_real(obj, "left_fraction", path)?,
    })
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::schema(path, "expected an object"))
}

fn get_usize(obj: &Map<String, Value>, key: &str, path: &str) -> Result<usize> {
    obj.get(key)
        .ok_or_else(|| Error::schema(path, format!("missing field '{key}'")))?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| Error::schema(path, format!("field '{key}' must be a non-negative integer")))
}

fn get_real<T: Real>(obj: &Map<String, Value>, key: &str, path: &str) -> Result<T> {
    let v = obj
        .get(key)
        .ok_or_else(|| Error::schema(path, format!("missing field '{key}'")))?;
    T::deserialize(v).map_err(|e| Error::schema(path, format!("field '{key}': {e}")))
}
