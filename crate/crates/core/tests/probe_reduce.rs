//! Temporary calibration probe for the weight-4 reduction solver.

use num_traits::One;
use polyfeq_core::cocycle::{j_map, FormalSum, JImage};
use polyfeq_core::gen::{
    five_term_obstruction_tensor, random_split_function, reduce_tensor4, reduce_weight4,
    symmetrized_quad_sum, symmetrized_quad_target, ReduceConfig, ReduceStatus,
};
use polyfeq_core::{qi, Q};
use rand::rngs::StdRng;
use rand::SeedableRng;
use std::time::Instant;

fn tensor_image(f: &FormalSum) -> polyfeq_core::tensor::ShTensor {
    match j_map(f).unwrap() {
        JImage::Tensor(t) => t,
        _ => panic!(),
    }
}

fn distinct_divisor_points(f: &polyfeq_core::RatFunc) -> usize {
    f.divisor().unwrap().support().count()
}

#[test]
fn probe_random_instances() {
    let mut rng = StdRng::seed_from_u64(901);
    for trial in 0..6 {
        let f = loop {
            let f = random_split_function(&mut rng, 4);
            if f.degree() == Some(4) && distinct_divisor_points(&f) >= 4 {
                break f;
            }
        };
        let sum = FormalSum::singleton(4, f.clone());
        let t0 = Instant::now();
        let cfg = ReduceConfig {
            depth: 2,
            ..ReduceConfig::default()
        };
        let r = reduce_weight4(&sum, &cfg).unwrap();
        println!(
            "trial {trial}: f = {f}, status {:?}, pool {}, points {}, depth {}, terms {}, {:?}",
            r.status,
            r.pool_size,
            r.points_used,
            r.closure_depth,
            r.terms.len(),
            t0.elapsed()
        );
        if r.status == ReduceStatus::Solved {
            let mut terms = vec![(f.clone(), Q::one())];
            for t in &r.terms {
                terms.push((t.function.clone(), -t.coefficient.clone()));
            }
            let resid = FormalSum::new(4, terms);
            assert!(tensor_image(&resid).is_zero(), "invariant violated");
        }
    }
}

#[test]
fn probe_peel() {
    use polyfeq_core::gen::involution_quad_triple;
    use polyfeq_core::tensor::ShTensor;
    let grade4 = |t: &ShTensor| {
        t.iter()
            .filter(|((m, y), _)| m.distinct_count() == 3 && m.count(y) == 0)
            .count()
    };
    let mut rng = StdRng::seed_from_u64(901);
    for trial in 0..6 {
        let f = loop {
            let f = random_split_function(&mut rng, 4);
            if f.degree() == Some(4) && distinct_divisor_points(&f) >= 4 {
                break f;
            }
        };
        let t = tensor_image(&FormalSum::singleton(4, f.clone()));
        let t0 = Instant::now();
        let mut r = t.clone();
        let mut peels = 0usize;
        let mut stuck = 0usize;
        loop {
            let before = grade4(&r);
            if before == 0 {
                break;
            }
            let key = r
                .iter()
                .find(|((m, y), _)| m.distinct_count() == 3 && m.count(y) == 0)
                .map(|((m, y), c)| (m.clone(), y.clone(), c.clone()));
            let Some((m, y, c)) = key else { break };
            let pts = m.points().to_vec();
            match involution_quad_triple(&pts[0], &pts[1], &pts[2], &y) {
                Ok(xs) => {
                    let img = tensor_image(&xs);
                    let scale = &c / &qi(12);
                    r.add_scaled(&img, &scale);
                    assert!(
                        r.coeff(&(m.clone(), y.clone())).is_zero(),
                        "peel did not cancel the key"
                    );
                    assert!(grade4(&r) < before, "peel raised grade-4 count");
                    peels += 1;
                }
                Err(e) => {
                    println!("  trial {trial}: peel stuck on {m:?} x {y}: {e:?}");
                    stuck += 1;
                    break;
                }
            }
        }
        println!(
            "trial {trial}: keys {} -> {} after {peels} peels ({stuck} stuck), supp {} -> {}, g4 {} -> {}, {:?}",
            t.term_count(),
            r.term_count(),
            t.point_support().len(),
            r.point_support().len(),
            grade4(&t),
            grade4(&r),
            t0.elapsed()
        );
        for depth in [0usize, 1] {
            let t1 = Instant::now();
            let cfg = ReduceConfig {
                depth,
                ..ReduceConfig::default()
            };
            let rr = reduce_tensor4(&r, &cfg);
            println!(
                "  remainder depth {depth}: status {:?}, pool {}, points {}, terms {}, {:?}",
                rr.status,
                rr.pool_size,
                rr.points_used,
                rr.terms.len(),
                t1.elapsed()
            );
            if rr.status == ReduceStatus::Solved {
                break;
            }
        }
    }
}

#[test]
fn probe_obstruction_scaling() {
    let p = five_term_obstruction_tensor(&qi(0), &qi(1), &qi(2), &qi(3)).unwrap();
    for cap in [200usize, 400, 800, 1600] {
        let t0 = Instant::now();
        let cfg = ReduceConfig {
            depth: 2,
            max_pool: cap,
            ..ReduceConfig::default()
        };
        let r = reduce_tensor4(&p, &cfg);
        println!(
            "cap {cap}: status {:?}, pool {}, points {}, depth {}, terms {}, {:?}",
            r.status,
            r.pool_size,
            r.points_used,
            r.closure_depth,
            r.terms.len(),
            t0.elapsed()
        );
    }
}

#[test]
fn probe_symmetrized_gap() {
    let x = [qi(0), qi(1), qi(2), qi(3)];
    let g = symmetrized_quad_sum(&x).unwrap();
    let target = symmetrized_quad_target(&x).unwrap();
    let sixth = Q::new(1.into(), 6.into());
    let mut gap = tensor_image(&g).scaled(&sixth);
    gap.add_scaled(&target, &-Q::one());
    println!("gap terms: {}", gap.term_count());
    for depth in [1usize, 2] {
        let t0 = Instant::now();
        let cfg = ReduceConfig {
            depth,
            ..ReduceConfig::default()
        };
        let r = reduce_tensor4(&gap, &cfg);
        println!(
            "gap depth {depth}: status {:?}, pool {}, points {}, terms {}, {:?}",
            r.status,
            r.pool_size,
            r.points_used,
            r.terms.len(),
            t0.elapsed()
        );
        if r.status == ReduceStatus::Solved {
            break;
        }
    }
}
