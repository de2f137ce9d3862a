//! Job configuration: JSON schema and command-line overrides. All scalars
//! are exact strings in the documented grammar; nothing is floating point.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use cherednik_core::groups::GroupSpec;

pub const CONFIG_SCHEMA: &str = "jobconfig/1";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    GroupInfo,
    Cohomology,
    Dirac,
    Hodge,
    Vogan,
    Cells,
    VerifyAll,
}

impl Task {
    pub fn parse(s: &str) -> Option<Task> {
        match s {
            "group-info" => Some(Task::GroupInfo),
            "cohomology" => Some(Task::Cohomology),
            "dirac" => Some(Task::Dirac),
            "hodge" => Some(Task::Hodge),
            "vogan" => Some(Task::Vogan),
            "cells" => Some(Task::Cells),
            "verify-all" => Some(Task::VerifyAll),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Task::GroupInfo => "group-info",
            Task::Cohomology => "cohomology",
            Task::Dirac => "dirac",
            Task::Hodge => "hodge",
            Task::Vogan => "vogan",
            Task::Cells => "cells",
            Task::VerifyAll => "verify-all",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CParam {
    Constant(String),
    PerClass(BTreeMap<String, String>),
}

impl Default for CParam {
    fn default() -> Self {
        CParam::Constant("0".to_string())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ModuleKind {
    Standard,
    Simple,
    BabyVerma,
    Ltriv,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub kind: ModuleKind,
    #[serde(default = "default_sigma")]
    pub sigma: String,
}

fn default_sigma() -> String {
    "triv".to_string()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RWindow {
    Auto(String),
    Range([i64; 2]),
}

impl Default for RWindow {
    fn default() -> Self {
        RWindow::Auto("auto".to_string())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Caps {
    #[serde(default = "default_pbw_cap")]
    pub pbw_degree: usize,
    #[serde(default = "default_group_cap")]
    pub group_order: usize,
}

fn default_pbw_cap() -> usize {
    3
}

fn default_group_cap() -> usize {
    48
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            pbw_degree: default_pbw_cap(),
            group_order: default_group_cap(),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Text,
    Json,
}

impl Default for OutputKind {
    fn default() -> Self {
        OutputKind::Text
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JobConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub group: GroupSpec,
    #[serde(default = "default_t")]
    pub t: String,
    #[serde(default)]
    pub c: CParam,
    pub task: Task,
    #[serde(default)]
    pub module: Option<ModuleSpec>,
    #[serde(default = "default_degree_bound")]
    pub degree_bound: usize,
    #[serde(default)]
    pub r_window: RWindow,
    #[serde(default)]
    pub output: OutputKind,
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default)]
    pub caps: Caps,
    /// timing is excluded from reports by default so identical configs give
    /// byte-identical output
    #[serde(default)]
    pub emit_timing: bool,
}

fn default_schema() -> String {
    CONFIG_SCHEMA.to_string()
}

fn default_t() -> String {
    "1".to_string()
}

fn default_degree_bound() -> usize {
    8
}

fn default_threads() -> usize {
    1
}

impl JobConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.schema != CONFIG_SCHEMA {
            return Err(format!("unknown config schema {}", self.schema));
        }
        if self.degree_bound == 0 && self.task != Task::GroupInfo {
            return Err("degree_bound must be positive".to_string());
        }
        if self.threads == 0 {
            return Err("threads must be positive".to_string());
        }
        if self.caps.group_order == 0 {
            return Err("caps.group_order must be positive".to_string());
        }
        if matches!(
            self.task,
            Task::Cohomology | Task::Dirac | Task::Hodge
        ) && self.module.is_none()
        {
            return Err(format!("task {} requires a module spec", self.task.name()));
        }
        cherednik_core::scalars::parse_scalar(&self.t).map_err(|e| e.to_string())?;
        match &self.c {
            CParam::Constant(s) => {
                cherednik_core::scalars::parse_scalar(s).map_err(|e| e.to_string())?;
            }
            CParam::PerClass(map) => {
                for v in map.values() {
                    cherednik_core::scalars::parse_scalar(v).map_err(|e| e.to_string())?;
                }
            }
        }
        Ok(())
    }
}
