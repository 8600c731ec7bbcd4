//! Hamilton products, the quaternionic inner product and the three flows
//! `x -> exp(axis t) x` on S^7.
//!
//! `cargo run --example quaternion_flows`

use qsphere::quat::{flow, inner, tangent_frame, Axis, Quaternion, SpherePoint};

fn main() -> qsphere::Result<()> {
    let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
    println!("ij = {}, ji = {}, ijk = {}", i * j, j * i, i * j * k);

    let x = SpherePoint::from_real(&[0.5, 0.1, -0.3, 0.2, 0.4, 0.0, 0.6, -0.3])?;
    let y = SpherePoint::basis(2, 1);
    let q = inner(x.as_hvector(), y.as_hvector())?;
    println!("<x, y> = {q}, |<x, y>| = {:.6}", q.norm());

    for axis in Axis::ALL {
        let moved = flow(&x, axis, 0.7);
        let back = flow(&moved, axis, -0.7);
        println!(
            "{axis:?}: |<x, flow(x)>| = {:.6}, round trip error {:.1e}",
            x.inner(&moved).norm(),
            back.as_hvector().sub(x.as_hvector()).norm()
        );
    }

    // the first three frame vectors are the flow directions, the rest are horizontal
    let frame = tangent_frame(&x);
    for (a, e) in frame.iter().enumerate() {
        let along: Vec<String> = frame.iter().map(|f| format!("{:+.0}", e.dot(f))).collect();
        println!("e{a}: <e, x> = {:+.1e}, gram row [{}]", e.dot(x.as_hvector()), along.join(" "));
    }
    Ok(())
}
