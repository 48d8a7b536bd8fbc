use std::collections::HashSet;

use serde::Serialize;

use super::registry::{PairAnimationRegistry, PairContext, Window};
use super::{AnimationError, Easing, Property, SplitMix64, Track, Value};
use crate::layout::{PrimId, SceneGraph};
use crate::spec::ValidatedNetwork;

/// Dropped unit indices for one feed-forward layer, in selection order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerDrop {
    pub layer: usize,
    pub dropped: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DropPlan {
    pub layers: Vec<LayerDrop>,
    pub rate: f64,
    pub seed: u64,
}

impl DropPlan {
    pub fn is_empty(&self) -> bool {
        self.layers.iter().all(|l| l.dropped.is_empty())
    }

    /// Ids of every dropped neuron.
    pub fn dropped_neurons(&self) -> HashSet<PrimId> {
        self.layers
            .iter()
            .flat_map(|l| l.dropped.iter().map(move |&j| PrimId::neuron(l.layer, j)))
            .collect()
    }
}

/// Picks `floor(rate * units)` distinct units in every eligible layer with a
/// partial Fisher-Yates shuffle. One generator stream is shared by all
/// layers, consumed in layer order.
pub fn plan_dropout(net: &ValidatedNetwork, rate: f64, seed: u64) -> Result<DropPlan, AnimationError> {
    let eligible = net.dropout_layers();
    if eligible.is_empty() {
        return Err(AnimationError::NoEligibleLayers);
    }
    let mut rng = SplitMix64::new(seed);
    let layers = eligible
        .into_iter()
        .map(|layer| {
            let n = net.layers[layer].units().expect("eligible layers are feed-forward") as usize;
            let k = (rate * n as f64).floor() as usize;
            let mut idx: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = i + rng.below((n - i) as u64) as usize;
                idx.swap(i, j);
            }
            idx.truncate(k);
            LayerDrop { layer, dropped: idx }
        })
        .collect();
    Ok(DropPlan { layers, rate, seed })
}

/// Tracks for one dropout directive spanning `window`:
///
/// * fade: dropped neurons and their incident edges ease to the dropped
///   opacity over the first half pair-duration,
/// * forward pass restricted to surviving elements,
/// * restore: everything eases back to base opacity in the first half of the
///   closing half pair-duration, then holds.
///
/// Every neuron of an eligible layer gets an opacity track; survivors' tracks
/// are constant.
pub fn dropout_timeline(
    scene: &SceneGraph,
    net: &ValidatedNetwork,
    plan: &DropPlan,
    window: Window,
    registry: &PairAnimationRegistry,
) -> Result<Vec<Track>, AnimationError> {
    let pair_s = net.spec.render.pair_duration_s;
    let half = 0.5 * pair_s;
    let fade_end = window.start + half;
    let pairs = net.layers.len() - 1;
    let restore_start = fade_end + pairs as f64 * pair_s;
    let restore_end = restore_start + 0.5 * (window.end - restore_start);

    let dropped = plan.dropped_neurons();
    let dropped_edges: HashSet<PrimId> = scene
        .pairs
        .iter()
        .flat_map(|p| {
            let (from, to) = (p.from, p.to);
            p.edges.iter().enumerate().filter_map({
                let dropped = &dropped;
                let dst_count = scene.layer(to).len();
                move |(i, e)| {
                    let (a, b) = (i / dst_count, i % dst_count);
                    let hit = dropped.contains(&PrimId::neuron(from, a))
                        || dropped.contains(&PrimId::neuron(to, b));
                    hit.then(|| e.clone())
                }
            })
        })
        .collect();

    let target_opacity = net.spec.style.dropped_opacity;
    let fade = |id: &PrimId, target: f64| {
        let base = scene.find(id).expect("scene id").base_style.opacity;
        Track::new(id.clone(), Property::Opacity)
            .key(window.start, Value::Real(base), Easing::Linear)
            .key(fade_end, Value::Real(target), Easing::SmoothStep)
            .key(restore_start, Value::Real(target), Easing::Hold)
            .key(restore_end, Value::Real(base), Easing::SmoothStep)
            .key(window.end, Value::Real(base), Easing::Hold)
    };

    let mut tracks = Vec::new();
    for l in &plan.layers {
        for id in scene.layer(l.layer) {
            let base = scene.find(id).expect("scene id").base_style.opacity;
            let target = if dropped.contains(id) { target_opacity } else { base };
            tracks.push(fade(id, target));
        }
    }
    for p in &scene.pairs {
        for e in p.edges.iter().filter(|e| dropped_edges.contains(*e)) {
            tracks.push(fade(e, target_opacity));
        }
    }

    let survivors = |ids: &[PrimId]| -> Vec<PrimId> {
        ids.iter().filter(|id| !dropped.contains(*id)).cloned().collect()
    };
    for from in 0..pairs {
        let full = PairContext::full(scene, &net.layers, &net.spec.style, from);
        let ctx = PairContext {
            source_elems: survivors(&full.source_elems),
            dest_elems: survivors(&full.dest_elems),
            edges: full.edges.iter().filter(|e| !dropped_edges.contains(*e)).cloned().collect(),
            ..full
        };
        let start = fade_end + from as f64 * pair_s;
        let end = if from + 1 == pairs { restore_start } else { fade_end + (from + 1) as f64 * pair_s };
        tracks.extend(registry.transition(&ctx, Window::new(start, end))?);
    }
    Ok(tracks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{layout_network, LayoutConfig};
    use crate::spec::{parse_spec, validate_network};

    fn ff_net(units: &[u32]) -> ValidatedNetwork {
        let layers: String = units.iter().map(|u| format!("layer ff {{ units: {u} }} ")).collect();
        validate_network(parse_spec(&format!("network {{ {layers} }} animate forward_pass {{}}")).unwrap())
            .unwrap()
    }

    #[test]
    fn quarter_of_five_drops_one() {
        let plan = plan_dropout(&ff_net(&[5, 2]), 0.25, 3).unwrap();
        assert_eq!(plan.layers.len(), 1);
        assert_eq!(plan.layers[0].dropped.len(), 1);
    }

    #[test]
    fn zero_rate_is_empty() {
        let plan = plan_dropout(&ff_net(&[5, 4, 2]), 0.0, 3).unwrap();
        assert!(plan.is_empty());
        assert_eq!(plan.layers.len(), 2);
    }

    #[test]
    fn reference_indices_for_seed_42() {
        // Computed offline with an independent SplitMix64 + partial
        // Fisher-Yates script.
        let plan = plan_dropout(&ff_net(&[10, 3]), 0.3, 42).unwrap();
        assert_eq!(plan.layers[0].dropped, vec![3, 2, 4]);
        let plan = plan_dropout(&ff_net(&[10, 10, 3]), 0.3, 42).unwrap();
        assert_eq!(plan.layers[0].dropped, vec![3, 2, 4]);
        assert_eq!(plan.layers[1].dropped, vec![4, 8, 1]);
    }

    #[test]
    fn output_layer_only_is_an_error() {
        let n = validate_network(
            parse_spec("network { layer conv2d { feature_maps: 1, map_size: 3, filter_size: 1 } layer ff { units: 3 } } animate forward_pass {}")
                .unwrap(),
        )
        .unwrap();
        assert_eq!(plan_dropout(&n, 0.5, 0), Err(AnimationError::NoEligibleLayers));
    }

    #[test]
    fn dropping_first_hidden_neuron_leaves_24_pulses() {
        let net = ff_net(&[3, 5, 3]);
        let scene = layout_network(&net, &LayoutConfig::default());
        let plan = DropPlan {
            layers: vec![
                LayerDrop { layer: 0, dropped: vec![] },
                LayerDrop { layer: 1, dropped: vec![0] },
            ],
            rate: 0.2,
            seed: 0,
        };
        let tracks = dropout_timeline(
            &scene,
            &net,
            &plan,
            Window::new(0.0, 3.0),
            &PairAnimationRegistry::standard(),
        )
        .unwrap();
        let pulses: Vec<_> = tracks.iter().filter(|t| t.property == Property::PulsePos).collect();
        // 15 + 15 edges minus 3 incoming and 3 outgoing.
        assert_eq!(pulses.len(), 24);
        assert!(pulses.iter().all(|t| t.start() >= 0.5 && t.end() <= 2.5));
    }
}
