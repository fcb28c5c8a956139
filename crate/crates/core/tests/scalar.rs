use nalgebra::{Point2, Vector2};
use vem_stokes::mesh::generate_quad_grid;
use vem_stokes::system::{assemble, interpolate_global, solve, Scheme, StokesProblem};
use vem_stokes::Mesh32;

#[test]
fn single_precision_patch_test() {
    let mesh: Mesh32 = generate_quad_grid(3).unwrap();
    // u = curl(x^2 y + x y^2 + x^3), p = x - 2y
    let u = |p: &Point2<f32>| Vector2::new(p.x * p.x + 2.0 * p.x * p.y, -(2.0 * p.x * p.y + p.y * p.y + 3.0 * p.x * p.x));
    let f = |_: &Point2<f32>| Vector2::new(-3.0f32, 10.0);
    let problem = StokesProblem::new(&mesh, 2, &f, &u);
    for scheme in [Scheme::Full, Scheme::Reduced] {
        let sys = assemble(&problem, scheme).unwrap();
        let sol = solve(&sys).unwrap();
        let ui = interpolate_global(&sys.elements, &sys.map, u);
        let err = (&sol.velocity - &ui).amax();
        assert!(err < 1e-4, "{scheme:?}: {err}");
    }
}

#[test]
fn single_and_double_precision_agree() {
    let mesh64 = generate_quad_grid::<f64>(4).unwrap();
    let mesh32: Mesh32 = mesh64.cast();
    let f64f = |p: &Point2<f64>| Vector2::new(p.y.sin(), p.x * p.x);
    let f32f = |p: &Point2<f32>| Vector2::new(p.y.sin(), p.x * p.x);
    let z64 = |_: &Point2<f64>| Vector2::zeros();
    let z32 = |_: &Point2<f32>| Vector2::zeros();
    let s64 = solve(&assemble(&StokesProblem::new(&mesh64, 2, &f64f, &z64), Scheme::Full).unwrap()).unwrap();
    let s32 = solve(&assemble(&StokesProblem::new(&mesh32, 2, &f32f, &z32), Scheme::Full).unwrap()).unwrap();
    let scale = s64.velocity.amax();
    for (a, b) in s64.velocity.iter().zip(s32.velocity.iter()) {
        assert!((a - *b as f64).abs() < 1e-4 * scale);
    }
}
