//! Implicit surfaces `{F = 0}` carrying a height function, with their full
//! symbolic derivative jets precompiled for fast numerical work.

use super::expr::{parse_expr, Expr, Program};
use crate::{Error, Result};

/// A compact surface patch `{F(x,y,z) = 0}` inside an axis-aligned search
/// box, together with a function `f` to study on it. Gradients and Hessians
/// of both `F` and `f` are produced symbolically at construction and
/// compiled into shared evaluation tapes.
#[derive(Clone, Debug)]
pub struct Surface {
    name: Option<String>,
    constraint_source: String,
    function_source: String,
    bounds: [[f64; 2]; 3],
    /// Outputs: `F, f, ∇F (3), ∇f (3)` — everything a flow step needs.
    flow_jet: Program,
    /// Outputs: the flow jet plus both Hessians (6 + 6 symmetric entries).
    full_jet: Program,
}

/// First-order data at a point: constraint and function values and gradients.
#[derive(Clone, Copy, Debug)]
pub struct FlowJet {
    pub constraint: f64,
    pub function: f64,
    pub constraint_gradient: [f64; 3],
    pub function_gradient: [f64; 3],
}

/// Second-order data at a point: the flow jet plus both Hessians.
#[derive(Clone, Copy, Debug)]
pub struct FullJet {
    pub flow: FlowJet,
    pub constraint_hessian: [[f64; 3]; 3],
    pub function_hessian: [[f64; 3]; 3],
}

impl Surface {
    pub fn new(constraint: Expr, function: Expr, bounds: [[f64; 2]; 3]) -> Result<Self> {
        for (axis, [lo, hi]) in bounds.iter().enumerate() {
            if !(lo < hi) {
                return Err(Error::InvalidSurface(format!(
                    "box is empty on axis {axis}: [{lo}, {hi}]"
                )));
            }
        }
        let constraint = constraint.folded();
        let function = function.folded();

        let grad = |e: &Expr| -> Vec<Expr> { (0..3).map(|v| e.derivative(v)).collect() };
        let d_constraint = grad(&constraint);
        let d_function = grad(&function);
        let hess = |d: &[Expr]| -> Vec<Expr> {
            // Row-major upper triangle: (0,0) (0,1) (0,2) (1,1) (1,2) (2,2).
            let mut out = Vec::new();
            for i in 0..3 {
                for j in i..3 {
                    out.push(d[i].derivative(j));
                }
            }
            out
        };
        let h_constraint = hess(&d_constraint);
        let h_function = hess(&d_function);

        let mut flow_exprs = vec![constraint.clone(), function.clone()];
        flow_exprs.extend(d_constraint.iter().cloned());
        flow_exprs.extend(d_function.iter().cloned());
        let mut full_exprs = flow_exprs.clone();
        full_exprs.extend(h_constraint);
        full_exprs.extend(h_function);

        Ok(Surface {
            name: None,
            constraint_source: constraint.to_string(),
            function_source: function.to_string(),
            bounds,
            flow_jet: Program::compile(&flow_exprs),
            full_jet: Program::compile(&full_exprs),
        })
    }

    pub fn from_sources(constraint: &str, function: &str, bounds: [[f64; 2]; 3]) -> Result<Self> {
        Surface::new(parse_expr(constraint)?, parse_expr(function)?, bounds)
    }

    fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn constraint_source(&self) -> &str {
        &self.constraint_source
    }

    pub fn function_source(&self) -> &str {
        &self.function_source
    }

    pub fn bounds(&self) -> [[f64; 2]; 3] {
        self.bounds
    }

    /// Whether a point lies in the search box, within `margin` per axis.
    pub fn in_box(&self, p: [f64; 3], margin: f64) -> bool {
        self.bounds
            .iter()
            .zip(p.iter())
            .all(|([lo, hi], &c)| c >= lo - margin && c <= hi + margin)
    }

    /// Evaluate values and gradients. `scratch` is a caller-held buffer so
    /// inner loops never allocate.
    pub fn flow_jet(&self, p: [f64; 3], scratch: &mut Vec<f64>) -> FlowJet {
        let mut out = [0.0; 8];
        self.flow_jet.eval(p, scratch, &mut out);
        FlowJet {
            constraint: out[0],
            function: out[1],
            constraint_gradient: [out[2], out[3], out[4]],
            function_gradient: [out[5], out[6], out[7]],
        }
    }

    /// Evaluate values, gradients, and Hessians.
    pub fn full_jet(&self, p: [f64; 3], scratch: &mut Vec<f64>) -> FullJet {
        let mut out = [0.0; 20];
        self.full_jet.eval(p, scratch, &mut out);
        let unpack = |s: &[f64]| -> [[f64; 3]; 3] {
            [
                [s[0], s[1], s[2]],
                [s[1], s[3], s[4]],
                [s[2], s[4], s[5]],
            ]
        };
        FullJet {
            flow: FlowJet {
                constraint: out[0],
                function: out[1],
                constraint_gradient: [out[2], out[3], out[4]],
                function_gradient: [out[5], out[6], out[7]],
            },
            constraint_hessian: unpack(&out[8..14]),
            function_hessian: unpack(&out[14..20]),
        }
    }

    /// The round sphere with height function `z`: two critical points, no
    /// saddles.
    pub fn sphere() -> Surface {
        Surface::from_sources(
            "x^2 + y^2 + z^2 - 1",
            "z",
            [[-1.5, 1.5], [-1.5, 1.5], [-1.5, 1.5]],
        )
        .expect("catalog surface is well-formed")
        .named("sphere")
    }

    /// The torus of revolution about the z-axis (tube radius 1 around a
    /// circle of radius 2), studied along `x`: one minimum, two saddles, one
    /// maximum, all on the x-axis.
    pub fn torus() -> Surface {
        Surface::from_sources(
            "(sqrt(x^2 + y^2) - 2)^2 + z^2 - 1",
            "x",
            [[-3.5, 3.5], [-3.5, 3.5], [-1.5, 1.5]],
        )
        .expect("catalog surface is well-formed")
        .named("torus")
    }

    /// A genus-two surface: the thickened lemniscate
    /// `((x^2+y^2)^2 - 2(x^2-y^2))^2 + z^2 = 1/25`, studied along `x`.
    /// Six critical points on the x-axis with index vector (0,1,1,1,1,2).
    pub fn genus_two() -> Surface {
        Surface::from_sources(
            "((x^2 + y^2)^2 - 2*(x^2 - y^2))^2 + z^2 - 1/25",
            "x",
            [[-1.8, 1.8], [-0.8, 0.8], [-0.4, 0.4]],
        )
        .expect("catalog surface is well-formed")
        .named("genus2")
    }

    /// A sphere with a dent pressed into its top along the parabola
    /// `z = x^2`: the height function `z` picks up an extra saddle and a
    /// second maximum, so the boundary operator is genuinely nonzero.
    pub fn dented_sphere() -> Surface {
        Surface::from_sources(
            "x^2 + y^2 + (z - x^2)^2 - 1",
            "z",
            [[-1.6, 1.6], [-1.6, 1.6], [-1.5, 1.7]],
        )
        .expect("catalog surface is well-formed")
        .named("dented")
    }

    /// Look up a catalog surface by name.
    pub fn catalog(name: &str) -> Option<Surface> {
        match name {
            "sphere" => Some(Surface::sphere()),
            "torus" => Some(Surface::torus()),
            "genus2" => Some(Surface::genus_two()),
            "dented" => Some(Surface::dented_sphere()),
            _ => None,
        }
    }

    /// All catalog surfaces, in a fixed order.
    pub fn catalog_names() -> &'static [&'static str] {
        &["sphere", "torus", "genus2", "dented"]
    }
}
