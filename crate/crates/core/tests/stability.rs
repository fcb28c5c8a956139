use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vem_stokes::harness::{build_mesh, Family, TestCase};
use vem_stokes::system::{assemble, inf_sup_constant, solve, Scheme, StokesProblem};
use vem_stokes::Mesh;

fn zero(_: &vem_stokes::Point) -> nalgebra::Vector2<f64> {
    nalgebra::Vector2::zeros()
}

fn beta(mesh: &Mesh, k: usize) -> f64 {
    let problem = StokesProblem::new(mesh, k, &zero, &zero);
    inf_sup_constant(&assemble(&problem, Scheme::Full).unwrap()).unwrap()
}

#[test]
fn inf_sup_constant_does_not_collapse_under_refinement() {
    for (family, h) in [(Family::Quad, 0.25), (Family::Triangle, 0.5), (Family::Voronoi, 0.25)] {
        for k in [2, 3] {
            let coarse = beta(&build_mesh(&family, h, 1, 100).unwrap(), k);
            let fine = beta(&build_mesh(&family, h / 2.0, 1, 100).unwrap(), k);
            eprintln!("{family} k={k}: beta {coarse:.4} -> {fine:.4}");
            assert!(coarse > 0.0 && fine >= 0.8 * coarse, "{family} k={k}: {coarse} -> {fine}");
        }
    }
}

#[test]
fn momentum_residual_vanishes_against_random_test_functions() {
    let case = TestCase::<f64>::test1(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for family in [Family::Quad, Family::Voronoi] {
        let mesh = build_mesh::<f64>(&family, 0.125, 1, 100).unwrap();
        let problem = StokesProblem::new(&mesh, 2, &*case.force, &*case.velocity);
        for scheme in [Scheme::Full, Scheme::Reduced] {
            let sys = assemble(&problem, scheme).unwrap();
            let sol = solve(&sys).unwrap();
            let mut x = DVector::zeros(sys.dim());
            for (s, idx) in sys.unknowns.velocity.iter().enumerate() {
                if let Some(i) = idx {
                    x[*i] = sol.velocity[s];
                }
            }
            for (c, modes) in sys.unknowns.pressure.iter().enumerate() {
                for (a, idx) in modes.iter().enumerate() {
                    if let Some(i) = idx {
                        x[*i] = sol.pressure[c][a];
                    }
                }
            }
            x[sys.unknowns.lambda] = sol.lambda;
            let r = sys.matrix.mul_vec(&x) - &sys.rhs;
            let nv = sys.unknowns.n_velocity;
            for _ in 0..20 {
                let w = DVector::from_fn(nv, |_, _| rng.gen_range(-1.0..1.0));
                let res = r.rows(0, nv).dot(&w).abs();
                let scale = sys.rhs.rows(0, nv).norm() * w.norm();
                assert!(res <= 1e-10 * scale, "{family} {scheme:?}: {res:e}");
            }
            assert!(sol.lambda.abs() < 1e-10);
        }
    }
}
