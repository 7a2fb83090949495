use evalexpr::{
    build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node,
    Value,
};

use crate::error::{Error, Result};

/// A real expression in named coordinates, e.g. `0.1*math::exp(-(x^2+y^2)/0.01)`.
#[derive(Debug, Clone)]
pub struct Expr {
    source: String,
    node: Node<DefaultNumericTypes>,
    variables: Vec<String>,
}

impl Expr {
    /// Fails on syntax errors and on identifiers outside `variables`.
    pub fn parse(source: &str, variables: &[String]) -> std::result::Result<Self, String> {
        let node = build_operator_tree::<DefaultNumericTypes>(source)
            .map_err(|e| format!("cannot parse `{source}`: {e}"))?;
        for id in node.iter_variable_identifiers() {
            if !variables.iter().any(|v| v == id) {
                return Err(format!(
                    "`{source}` refers to `{id}`, which is not one of the variables {variables:?}"
                ));
            }
        }
        Ok(Self {
            source: source.to_string(),
            node,
            variables: variables.to_vec(),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
        for (name, v) in self.variables.iter().zip(x) {
            ctx.set_value(name.clone(), Value::Float(*v))
                .map_err(|e| Error::Domain(e.to_string()))?;
        }
        self.node
            .eval_number_with_context(&ctx)
            .map_err(|e| Error::Domain(format!("evaluating `{}`: {e}", self.source)))
    }
}
