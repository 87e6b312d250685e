//! Per-module exported interface.

use super::tast::{ExternalModule, ModuleInfo, Program, VarSlot};
use super::types::Type;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleSignature {
    pub name: String,
    pub multi: bool,
    /// Program-relative; absent for signatures read back from an interface file.
    pub module_id: Option<u32>,
    pub exports: Vec<(String, Type)>,
    /// STATE constants declared at the top of the module body.
    pub states: Vec<(String, i64)>,
}

impl ModuleSignature {
    pub fn instance_count(&self) -> u32 {
        if self.multi {
            2
        } else {
            1
        }
    }

    /// The signature with its program-relative id cleared.
    pub fn portable(&self) -> ModuleSignature {
        ModuleSignature {
            module_id: None,
            ..self.clone()
        }
    }

    pub(crate) fn as_external(&self) -> ExternalModule {
        let mut offset = 0;
        let vars = self
            .exports
            .iter()
            .map(|(name, ty)| {
                let slot = VarSlot {
                    name: name.clone(),
                    ty: ty.clone(),
                    offset,
                    exported: true,
                };
                offset += ty.storage_size();
                slot
            })
            .collect();
        ExternalModule {
            name: self.name.clone(),
            multi: self.multi,
            vars,
        }
    }
}

pub fn build_signature(module: &ModuleInfo) -> ModuleSignature {
    ModuleSignature {
        name: module.name.clone(),
        multi: module.multi,
        module_id: Some(module.first_id),
        exports: module
            .vars
            .iter()
            .filter(|v| v.exported)
            .map(|v| (v.name.clone(), v.ty.clone()))
            .collect(),
        states: module.states.clone(),
    }
}

pub fn build_signatures(program: &Program) -> Vec<ModuleSignature> {
    program.modules.iter().map(build_signature).collect()
}
