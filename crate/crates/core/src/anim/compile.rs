use std::collections::HashMap;

use super::dropout::{dropout_timeline, plan_dropout};
use super::registry::{PairAnimationRegistry, PairContext, Window};
use super::{AnimationError, DirectiveSegment, Property, Timeline, Track};
use crate::layout::{PrimId, SceneGraph};
use crate::spec::{AnimationDirective, ValidatedNetwork};

/// Seconds a directive occupies for a network of `layers` layers.
pub fn directive_duration(directive: &AnimationDirective, layers: usize, pair_s: f64) -> f64 {
    let pass = (layers - 1) as f64 * pair_s;
    match directive {
        AnimationDirective::ForwardPass => pass,
        AnimationDirective::Dropout { .. } => 0.5 * pair_s + pass + 0.5 * pair_s,
    }
}

/// Compiles every directive with the standard pair registry.
pub fn compile_animations(net: &ValidatedNetwork, scene: &SceneGraph) -> Timeline {
    compile_with(net, scene, &PairAnimationRegistry::standard())
        .expect("validated networks only contain registered pairs with dropout-eligible layers")
}

/// Compiles the directives in order, each offset by the running clock.
///
/// Style tracks that hit the same property of the same primitive are merged
/// into one track; overlay tracks are kept separate.
pub fn compile_with(
    net: &ValidatedNetwork,
    scene: &SceneGraph,
    registry: &PairAnimationRegistry,
) -> Result<Timeline, AnimationError> {
    let pair_s = net.spec.render.pair_duration_s;
    let pairs = net.layers.len() - 1;
    let mut clock = 0.0;
    let mut tracks = Vec::new();
    let mut segments = Vec::new();

    for (index, directive) in net.spec.directives.iter().enumerate() {
        let start = clock;
        let end = start + directive_duration(directive, net.layers.len(), pair_s);
        match directive {
            AnimationDirective::ForwardPass => {
                let w = Window::new(start, end);
                for from in 0..pairs {
                    let ctx = PairContext::full(scene, &net.layers, &net.spec.style, from);
                    tracks.extend(registry.transition(&ctx, w.slice(from, pairs))?);
                }
            }
            AnimationDirective::Dropout { rate, seed } => {
                let plan = plan_dropout(net, *rate, *seed)?;
                tracks.extend(dropout_timeline(scene, net, &plan, Window::new(start, end), registry)?);
            }
        }
        segments.push(DirectiveSegment { directive: index, start_s: start, end_s: end });
        clock = end;
    }

    Ok(Timeline { tracks: merge_style_tracks(tracks), duration_s: clock, segments })
}

fn merge_style_tracks(tracks: Vec<Track>) -> Vec<Track> {
    let mut out: Vec<Track> = Vec::with_capacity(tracks.len());
    let mut slot: HashMap<(PrimId, Property), usize> = HashMap::new();
    for track in tracks {
        if track.property.is_overlay() {
            out.push(track);
            continue;
        }
        let key = (track.target.clone(), track.property);
        match slot.get(&key) {
            None => {
                slot.insert(key, out.len());
                out.push(track);
            }
            Some(&i) => {
                let target = out[i].target.clone();
                let merged = &mut out[i].keys;
                for k in track.keys {
                    match merged.iter().position(|m| m.t >= k.t) {
                        None => merged.push(k),
                        Some(p) if merged[p].t == k.t => {
                            debug_assert_eq!(
                                merged[p].value, k.value,
                                "conflicting keys for {} at t={}",
                                target, k.t
                            );
                        }
                        Some(p) => merged.insert(p, k),
                    }
                }
            }
        }
    }
    out
}
