//! Fixtures shared by the kernel benchmarks.

use rswlab_core::env::generate_square_lattice;
use rswlab_core::ust::WiredGraph;
use rswlab_core::{EmbeddedGraph, Point, Rect};

/// Unit lattice on `Λ_half`.
pub fn lattice(half: f64) -> EmbeddedGraph {
    generate_square_lattice(Rect::square(Point::ORIGIN, half), 1.0).expect("valid box")
}

/// Wired domain `Λ_half` at mesh `delta`.
pub fn wired_box(half: f64, delta: f64) -> WiredGraph {
    let bx = Rect::square(Point::ORIGIN, half);
    let g = generate_square_lattice(bx, delta).expect("valid box");
    WiredGraph::from_rect(&g, &bx).expect("non-empty interior")
}
