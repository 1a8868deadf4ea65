//! Top-down SVG rendering of a run: walls, moving-obstacle trajectories,
//! explored tree nodes, pre- and post-rewire solution paths, footsteps and
//! the CoM trajectory, each on a toggleable layer.

use std::fmt::Write;

use crate::geom::{Bounds, Vec2};
use crate::planner::{Solution, Tree};
use crate::solution::{ComSample, SolutionRecord, StanceSide};
use crate::world::{Motion, Obstacle, OrientedRect, World};

/// Which layers to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layers {
    pub walls: bool,
    pub obstacles: bool,
    pub tree: bool,
    pub solution: bool,
    pub rewired: bool,
    pub footsteps: bool,
    pub com: bool,
}

impl Default for Layers {
    fn default() -> Self {
        Self {
            walls: true,
            obstacles: true,
            tree: true,
            solution: true,
            rewired: true,
            footsteps: true,
            com: true,
        }
    }
}

pub struct SvgScene<'a> {
    pub bounds: Bounds<f64>,
    pub world: &'a World<f64>,
    pub tree: Option<&'a Tree<f64>>,
    pub pre_rewire: Option<&'a Solution<f64>>,
    pub post_rewire: Option<&'a Solution<f64>>,
    pub footsteps: Option<&'a SolutionRecord>,
    pub com: Option<&'a [ComSample]>,
    pub start: Vec2<f64>,
    pub goal: Vec2<f64>,
}

struct Mapper {
    min_x: f64,
    max_y: f64,
    scale: f64,
    margin: f64,
    width: f64,
    height: f64,
}

impl Mapper {
    fn new(bounds: &Bounds<f64>) -> Self {
        let span_x = (bounds.max[0] - bounds.min[0]).max(1e-6);
        let span_y = (bounds.max[1] - bounds.min[1]).max(1e-6);
        let target = 900.0;
        let scale = target / span_x.max(span_y);
        let margin = 20.0;
        Self {
            min_x: bounds.min[0],
            max_y: bounds.max[1],
            scale,
            margin,
            width: span_x * scale + 2.0 * margin,
            height: span_y * scale + 2.0 * margin,
        }
    }

    fn point(&self, p: Vec2<f64>) -> (f64, f64) {
        (
            (p.x - self.min_x) * self.scale + self.margin,
            (self.max_y - p.y) * self.scale + self.margin,
        )
    }

    fn len(&self, meters: f64) -> f64 {
        meters * self.scale
    }
}

fn fmt_f(v: f64) -> String {
    format!("{:.2}", v)
}

fn rect_element(m: &Mapper, rect: &OrientedRect<f64>, style: &str) -> String {
    let (cx, cy) = m.point(rect.center);
    let w = m.len(2.0 * rect.half_extents.x);
    let h = m.len(2.0 * rect.half_extents.y);
    // Screen y points down, so a CCW world rotation is CW on screen.
    let deg = -rect.orientation.to_degrees();
    format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" transform=\"rotate({} {} {})\" {}/>",
        fmt_f(cx - 0.5 * w),
        fmt_f(cy - 0.5 * h),
        fmt_f(w),
        fmt_f(h),
        fmt_f(deg),
        fmt_f(cx),
        fmt_f(cy),
        style
    )
}

fn polyline(m: &Mapper, points: impl Iterator<Item = Vec2<f64>>, style: &str) -> String {
    let mut coords = String::new();
    for p in points {
        let (x, y) = m.point(p);
        let _ = write!(coords, "{},{} ", fmt_f(x), fmt_f(y));
    }
    format!(
        "<polyline points=\"{}\" fill=\"none\" {}/>",
        coords.trim_end(),
        style
    )
}

fn solution_polyline(m: &Mapper, solution: &Solution<f64>, style: &str) -> String {
    polyline(m, solution.steps.iter().map(|s| s.config.position()), style)
}

/// Render the scene to a standalone SVG document.
pub fn render(scene: &SvgScene<'_>, layers: &Layers) -> String {
    let m = Mapper::new(&scene.bounds);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        fmt_f(m.width),
        fmt_f(m.height),
        fmt_f(m.width),
        fmt_f(m.height)
    );
    let _ = writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\" stroke=\"#444\"/>",
        fmt_f(m.width),
        fmt_f(m.height)
    );

    if layers.walls {
        let _ = writeln!(out, "<g id=\"walls\">");
        for obs in &scene.world.obstacles {
            if matches!(obs.motion, Motion::Static) {
                let _ = writeln!(
                    out,
                    "{}",
                    rect_element(&m, &obs.shape, "fill=\"#c23b3b\" fill-opacity=\"0.85\"")
                );
            }
        }
        let _ = writeln!(out, "</g>");
    }

    if layers.obstacles {
        let _ = writeln!(out, "<g id=\"obstacles\">");
        for obs in &scene.world.obstacles {
            match obs.motion {
                Motion::Static => {}
                Motion::Linear { .. } | Motion::Circular { .. } => {
                    let _ = writeln!(out, "{}", mover_trajectory(&m, obs));
                    let _ = writeln!(
                        out,
                        "{}",
                        rect_element(
                            &m,
                            &obs.pose_at(0.0),
                            "fill=\"#777\" stroke=\"#333\" fill-opacity=\"0.9\""
                        )
                    );
                }
            }
        }
        let _ = writeln!(out, "</g>");
    }

    if layers.tree {
        if let Some(tree) = scene.tree {
            let _ = writeln!(out, "<g id=\"tree\" fill=\"#9ecae1\" fill-opacity=\"0.6\">");
            for node in tree.nodes() {
                let (x, y) = m.point(node.config.position());
                let _ = writeln!(
                    out,
                    "<circle cx=\"{}\" cy=\"{}\" r=\"1.2\"/>",
                    fmt_f(x),
                    fmt_f(y)
                );
            }
            let _ = writeln!(out, "</g>");
        }
    }

    if layers.com {
        if let Some(samples) = scene.com {
            let _ = writeln!(out, "<g id=\"com\">");
            let _ = writeln!(
                out,
                "{}",
                polyline(
                    &m,
                    samples.iter().map(|s| Vec2::new(s.x, s.y)),
                    "stroke=\"black\" stroke-width=\"1\" stroke-opacity=\"0.8\""
                )
            );
            let _ = writeln!(out, "</g>");
        }
    }

    if layers.solution {
        if let Some(sol) = scene.pre_rewire {
            let _ = writeln!(out, "<g id=\"solution\">");
            let _ = writeln!(
                out,
                "{}",
                solution_polyline(&m, sol, "stroke=\"#1f4fd8\" stroke-width=\"2\"")
            );
            let _ = writeln!(out, "</g>");
        }
    }

    if layers.rewired {
        if let Some(sol) = scene.post_rewire {
            let _ = writeln!(out, "<g id=\"rewired\">");
            let _ = writeln!(
                out,
                "{}",
                solution_polyline(&m, sol, "stroke=\"#d62728\" stroke-width=\"2\"")
            );
            let _ = writeln!(out, "</g>");
        }
    }

    if layers.footsteps {
        if let Some(record) = scene.footsteps {
            let _ = writeln!(out, "<g id=\"footsteps\">");
            for row in &record.rows {
                let (x, y) = m.point(Vec2::new(row.foot_x, row.foot_y));
                let color = match row.side {
                    StanceSide::Left => "#2ca02c",
                    StanceSide::Right => "#ff7f0e",
                };
                let _ = writeln!(
                    out,
                    "<rect x=\"{}\" y=\"{}\" width=\"4\" height=\"4\" fill=\"{}\"/>",
                    fmt_f(x - 2.0),
                    fmt_f(y - 2.0),
                    color
                );
            }
            let _ = writeln!(out, "</g>");
        }
    }

    // Start and goal markers always draw on top.
    let (sx, sy) = m.point(scene.start);
    let (gx, gy) = m.point(scene.goal);
    let _ = writeln!(
        out,
        "<circle cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"#2ca02c\" stroke=\"black\"/>",
        fmt_f(sx),
        fmt_f(sy)
    );
    let _ = writeln!(
        out,
        "<circle cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"#d62728\" stroke=\"black\"/>",
        fmt_f(gx),
        fmt_f(gy)
    );
    let _ = writeln!(out, "</svg>");
    out
}

fn mover_trajectory(m: &Mapper, obs: &Obstacle<f64>) -> String {
    const DASH: &str = "stroke=\"#b44\" stroke-width=\"1\" stroke-dasharray=\"6 4\" fill=\"none\"";
    match obs.motion {
        Motion::Static => String::new(),
        Motion::Linear {
            velocity,
            ping_pong,
        } => {
            let speed = velocity.norm();
            let dir = if speed > 0.0 {
                velocity.scale(1.0 / speed)
            } else {
                Vec2::new(0.0, 0.0)
            };
            let (lo, hi) = ping_pong.unwrap_or((0.0, speed * 10.0));
            let a = m.point(obs.shape.center + dir.scale(lo));
            let b = m.point(obs.shape.center + dir.scale(hi));
            format!(
                "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {}/>",
                fmt_f(a.0),
                fmt_f(a.1),
                fmt_f(b.0),
                fmt_f(b.1),
                DASH
            )
        }
        Motion::Circular { center, radius, .. } => {
            let (cx, cy) = m.point(center);
            format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" {}/>",
                fmt_f(cx),
                fmt_f(cy),
                fmt_f(m.len(radius)),
                DASH
            )
        }
    }
}
