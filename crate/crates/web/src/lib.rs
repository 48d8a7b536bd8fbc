//! Browser bindings: compile a spec, scrub through it as SVG, re-plan
//! dropout and export a GIF.
//!
//! [`Session`] is plain Rust so it can be tested natively; [`Demo`] is the
//! thin JavaScript-facing wrapper.

use std::collections::HashMap;

use nnanim::pipeline::{compile_spec, Compiled};
use nnanim::spec::{parse_spec, AnimationDirective, MemoryImages, NetworkSpec};
use wasm_bindgen::prelude::*;

/// Grayscale image available to specs as `source: "digit.pgm"`.
pub const SAMPLE_PGM: &str = include_str!("../www/digit.pgm");

fn images() -> MemoryImages {
    MemoryImages(HashMap::from([("digit.pgm".to_string(), SAMPLE_PGM.to_string())]))
}

pub struct Session {
    spec: NetworkSpec,
    compiled: Compiled,
}

impl Session {
    pub fn new(source: &str) -> Result<Self, String> {
        let spec = parse_spec(source).map_err(|e| e.to_string())?;
        let compiled = compile_spec(spec.clone(), &images()).map_err(|e| e.to_string())?;
        Ok(Session { spec, compiled })
    }

    pub fn duration(&self) -> f64 {
        self.compiled.timeline.duration_s
    }

    pub fn fps(&self) -> u32 {
        self.compiled.net.spec.render.fps
    }

    /// The scene at `t`, clamped into the timeline.
    pub fn svg_at(&self, t: f64) -> String {
        let t = t.clamp(0.0, self.duration());
        let frame = self.compiled.sampler().sample(0, t).expect("clamped into range");
        self.compiled.frame_svg(&frame)
    }

    /// Sets rate and seed on every dropout directive and recompiles.
    pub fn replan_dropout(&mut self, rate: f64, seed: u64) -> Result<(), String> {
        let mut spec = self.spec.clone();
        for d in &mut spec.directives {
            if let AnimationDirective::Dropout { rate: r, seed: s } = d {
                (*r, *s) = (rate, seed);
            }
        }
        self.compiled = compile_spec(spec.clone(), &images()).map_err(|e| e.to_string())?;
        self.spec = spec;
        Ok(())
    }

    /// Dropped units per eligible layer for each dropout directive, as text.
    pub fn plan_summary(&self) -> String {
        let mut lines = Vec::new();
        for (i, d) in self.spec.directives.iter().enumerate() {
            if let AnimationDirective::Dropout { rate, seed } = d {
                let plan = nnanim::anim::plan_dropout(&self.compiled.net, *rate, *seed)
                    .expect("compiled networks have eligible layers");
                let layers: Vec<String> =
                    plan.layers.iter().map(|l| format!("L{}: {:?}", l.layer, l.dropped)).collect();
                lines.push(format!("directive {i}: {}", layers.join(", ")));
            }
        }
        lines.join("\n")
    }

    pub fn gif(&self) -> Result<Vec<u8>, String> {
        self.compiled.gif(1).map(|g| g.bytes).map_err(|e| e.to_string())
    }
}

#[wasm_bindgen]
pub struct Demo(Session);

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(source: &str) -> Result<Demo, JsError> {
        Session::new(source).map(Demo).map_err(|e| JsError::new(&e))
    }

    pub fn duration(&self) -> f64 {
        self.0.duration()
    }

    pub fn fps(&self) -> u32 {
        self.0.fps()
    }

    #[wasm_bindgen(js_name = svgAt)]
    pub fn svg_at(&self, t: f64) -> String {
        self.0.svg_at(t)
    }

    #[wasm_bindgen(js_name = replanDropout)]
    pub fn replan_dropout(&mut self, rate: f64, seed: u64) -> Result<(), JsError> {
        self.0.replan_dropout(rate, seed).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = planSummary)]
    pub fn plan_summary(&self) -> String {
        self.0.plan_summary()
    }

    pub fn gif(&self) -> Result<Vec<u8>, JsError> {
        self.0.gif().map_err(|e| JsError::new(&e))
    }
}
