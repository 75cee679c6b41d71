//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits non-zero if
//! any criterion fails. Run with `cargo test --release -p mcmullen-core --test acceptance`.

use mcmullen_core::bodies::Contact;
use mcmullen_core::cones::{
    build_cone_family, refined_family_2d, thinning_homogeneous, verify_partial_homogeneity, ColoredPointSet,
    ConeFamily, ConeThinning,
};
use mcmullen_core::derivative::{rank_trace, DerivativeConfig, Engine};
use mcmullen_core::faces::{
    affine_hull_dim, dimension_bound_check, extremalize, is_extreme_segment, nearest_maximal_chord, AffineSubspace,
};
use mcmullen_core::game::{
    perfect_set_extract, play_match, EnumerateDeleter, GoodCopyPlayer, MatchConfig, Outcome, RandomLegal, RankReducer,
    RunRecord, Strategy,
};
use mcmullen_core::{generators, rng, vector, ConvexBody, GameState, Homothet, Move, Player, TargetSet, Vector, TAU};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::time::Instant;

type Verdict = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unit(r: &mut rng::Rng, d: usize) -> Vector {
    loop {
        let v = Vector::from_iterator(d, (0..d).map(|_| r.sample::<f64, _>(StandardNormal)));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e:?}"))
}

/// Gauge of `z` from the body's own description: `|z|` for balls, `max nᵢ·z / bᵢ` for
/// polytopes in `n·z ≤ b` form.
fn gauge(body: &ConvexBody, z: &Vector) -> f64 {
    if body.is_ball() {
        z.norm()
    } else {
        body.facets()
            .iter()
            .map(|f| f.normal.dot(z) / f.offset)
            .fold(0.0, f64::max)
    }
}

fn gauge_in(body: &ConvexBody, q: &Homothet, z: &Vector) -> f64 {
    gauge(body, &((z - &q.center) / q.scale))
}

fn polytopes_and_balls() -> Result<Vec<ConvexBody>, String> {
    let mut v = vec![
        generators::disk(),
        ok(ConvexBody::ball(3), "ball")?,
        generators::square(),
        ok(generators::regular_ngon(3), "triangle")?,
        ok(generators::regular_ngon(7), "heptagon")?,
        ok(generators::cube(), "cube")?,
        ok(generators::tetrahedron(), "tetrahedron")?,
        ok(generators::prism(), "prism")?,
    ];
    for s in 0..3 {
        v.push(ok(generators::random_polytope(2, 9, s), "random polygon")?);
        v.push(ok(generators::random_polytope(3, 14, s), "random polytope")?);
    }
    Ok(v)
}

fn planar_polygons() -> Result<Vec<ConvexBody>, String> {
    let mut v = vec![
        generators::square(),
        ok(generators::regular_ngon(3), "triangle")?,
        ok(generators::regular_ngon(5), "pentagon")?,
    ];
    for s in 0..3 {
        v.push(ok(generators::random_polytope(2, 10, 40 + s), "random polygon")?);
    }
    Ok(v)
}

/// Smallest scale at which a copy centred at `w` covers `pts`.
fn cover_scale(body: &ConvexBody, pts: &[Vector], w: &Vector) -> f64 {
    pts.iter().map(|p| gauge(body, &(p - w))).fold(0.0, f64::max)
}

/// Grid search over centers, zooming in on the best cell.
fn brute_force_cover(body: &ConvexBody, pts: &[Vector], radius: f64) -> f64 {
    let d = body.dim();
    let n: usize = if d == 2 { 41 } else { 15 };
    let mut lo = Vector::from_iterator(
        d,
        (0..d).map(|k| pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min) - radius),
    );
    let mut hi = Vector::from_iterator(
        d,
        (0..d).map(|k| pts.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max) + radius),
    );
    let mut best = f64::INFINITY;
    for _ in 0..40 {
        let step = (&hi - &lo) / (n - 1) as f64;
        let mut arg = lo.clone();
        let total = n.pow(d as u32);
        for idx in 0..total {
            let mut rem = idx;
            let w = Vector::from_iterator(
                d,
                (0..d).map(|k| {
                    let i = rem % n;
                    rem /= n;
                    lo[k] + step[k] * i as f64
                }),
            );
            let t = cover_scale(body, pts, &w);
            if t < best {
                best = t;
                arg = w;
            }
        }
        lo = &arg - &step * 2.0;
        hi = &arg + &step * 2.0;
    }
    best
}

fn directions(d: usize, count: usize) -> Vec<Vector> {
    if d == 2 {
        (0..count)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / count as f64;
                vector(&[a.cos(), a.sin()])
            })
            .collect()
    } else {
        // Fibonacci sphere.
        let g = PI * (3.0 - 5f64.sqrt());
        (0..count)
            .map(|i| {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let a = g * i as f64;
                vector(&[r * a.cos(), r * a.sin(), z])
            })
            .collect()
    }
}

fn kernel_suite() -> Verdict {
    let start = Instant::now();
    let mut bodies = polytopes_and_balls()?;
    bodies.push(ok(generators::ellipse(2.0, 1.0, 512), "ellipse")?);

    let mut r = rng::stream(1, 0);
    let mut pairs = 0;
    for b in &bodies {
        let d = b.dim();
        for _ in 0..500 {
            let u = unit(&mut r, d) * r.gen_range(0.1..10.0);
            let v = unit(&mut r, d) * r.gen_range(0.1..10.0);
            let (hu, hv, huv) = (b.support_value(&u), b.support_value(&v), b.support_value(&(&u + &v)));
            check(huv <= hu + hv + TAU, || {
                format!("{}: support not subadditive at {u} {v}", b.name())
            })?;
            let lam = r.gen_range(0.01..100.0);
            let hl = b.support_value(&(&u * lam));
            check((hl - lam * hu).abs() <= TAU, || {
                format!("{}: support not homogeneous, λ={lam}", b.name())
            })?;
            pairs += 1;
        }
    }

    let enclosable = polytopes_and_balls()?;
    let cases: Vec<(usize, Vec<Vector>)> = (0..500u64)
        .map(|i| {
            let mut r = rng::stream(2, i);
            let b = i as usize % enclosable.len();
            let d = enclosable[b].dim();
            let m = r.gen_range(2..=6);
            let pts = (0..m)
                .map(|_| Vector::from_iterator(d, (0..d).map(|_| r.gen_range(-2.0..2.0))))
                .collect();
            (b, pts)
        })
        .collect();
    let worst = cases
        .par_iter()
        .map(|(b, pts)| -> Result<f64, String> {
            let body = &enclosable[*b];
            let h = ok(body.min_enclosing_homothet(pts), "minimal enclosing copy")?;
            let tol = 10.0 * TAU * h.scale.max(1.0);
            let covers = cover_scale(body, pts, &h.center);
            check(covers <= h.scale + tol, || {
                format!(
                    "{}: returned copy needs scale {covers}, claims {}",
                    body.name(),
                    h.scale
                )
            })?;
            let brute = brute_force_cover(body, pts, h.scale * body.circumradius() + 0.1);
            check(brute >= h.scale - tol, || {
                format!(
                    "{}: grid finds scale {brute} below {} for {pts:?}",
                    body.name(),
                    h.scale
                )
            })?;
            Ok(h.scale - brute)
        })
        .collect::<Result<Vec<f64>, String>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);

    let mut chords = 0;
    for b in &bodies {
        let two_r = 2.0 * b.inradius();
        for u in directions(b.dim(), 720) {
            let (len, seg) = ok(b.max_chord(&u), "max chord")?;
            check(len >= two_r - TAU, || {
                format!("{}: chord {len} < 2·inradius {two_r} along {u}", b.name())
            })?;
            let dir = &seg.y - &seg.x;
            check(
                (dir.norm() - len).abs() <= 1e-9 && (dir.dot(&u).abs() - len).abs() <= 1e-9,
                || format!("{}: chord segment does not match its length or direction", b.name()),
            )?;
            chords += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "{pairs} support pairs, 500 enclosing cases (grid gap {worst:.1e}), {chords} chords in {secs:.1} s"
    ))
}

fn delta_suite() -> Verdict {
    let disk = generators::disk().delta_global().map_err(|e| e.to_string())?;
    check((disk.value - 1.0).abs() <= 1e-6, || format!("disk δ = {}", disk.value))?;
    let mut lows = vec![format!("disk {:.6}", disk.value)];
    for (a, b) in [(2.0, 1.0), (1.5, 1.0), (3.0, 1.0)] {
        let e = ok(generators::ellipse(a, b, 512), "ellipse")?;
        let d = ok(e.delta_global(), "ellipse δ")?;
        check(d.value > 0.0, || format!("ellipse {a}:{b} has δ = {}", d.value))?;
        lows.push(format!("ellipse {a}:{b} {:.4}", d.value));
    }
    let ball = ok(ok(ConvexBody::ball(3), "ball")?.delta_global(), "ball δ")?;
    check(ball.value > 0.0, || "3-ball has δ = 0".into())?;

    let sq = generators::square();
    let g = ok(sq.delta_global(), "square δ")?;
    check(g.value.abs() <= TAU, || format!("square δ = {}", g.value))?;
    check(g.point.iter().all(|c| (c.abs() - 1.0).abs() <= 1e-9), || {
        format!("square minimum at {} is not a corner", g.point)
    })?;
    for c in [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]] {
        let v = ok(sq.delta_at(&vector(&c)), "corner δ")?.value;
        check(v.abs() <= TAU, || format!("corner {c:?} has δ = {v}"))?;
    }
    for k in 1..20 {
        let t = -1.0 + 0.1 * k as f64;
        let v = ok(sq.delta_at(&vector(&[-1.0, t])), "edge δ")?.value;
        check(v >= 1.0 / 2f64.sqrt() - 1e-9, || {
            format!("edge point (-1,{t}) has δ = {v}")
        })?;
    }
    Ok(format!(
        "{}; square 0 at the corners, ≥ 1/√2 along edges",
        lows.join(", ")
    ))
}

fn scaling_suite() -> Verdict {
    let bodies = vec![
        generators::disk(),
        generators::square(),
        ok(generators::ellipse(2.0, 1.0, 512), "ellipse")?,
        ok(generators::regular_ngon(5), "pentagon")?,
        ok(generators::random_polytope(2, 9, 3), "random polygon")?,
        ok(ConvexBody::ball(3), "ball")?,
        ok(generators::cube(), "cube")?,
    ];
    let mut r = rng::stream(3, 0);
    let (mut admissible, mut rejected, mut oversize_rejected) = (0, 0, 0);
    let mut tries = 0;
    while admissible < 200 {
        tries += 1;
        if tries > 50_000 {
            return Err(format!("only {admissible} admissible instances in {tries} tries"));
        }
        let body = &bodies[tries % bodies.len()];
        let d = body.dim();
        let eps: f64 = r.gen_range(0.05..0.6);
        let delta = eps * r.gen_range(0.1..1.4);
        let u = unit(&mut r, d);
        let b = &u * body.ray_exit(&Vector::zeros(d), &u);
        let center = &b * (1.0 - delta * r.gen_range(1.0..1.3));
        let q = Homothet::new(center, delta);
        match body.scale_bound_check(&q, eps) {
            Ok(sb) => {
                check(sb.holds && sb.delta <= eps + TAU, || {
                    format!("{}: δ = {delta} > ε = {eps}", body.name())
                })?;
                admissible += 1;
            }
            Err(_) => {
                rejected += 1;
                if delta > eps + TAU {
                    oversize_rejected += 1;
                }
            }
        }
    }

    let body = generators::disk();
    let target = generators::circle(200);
    let si = ok(GoodCopyPlayer::new(&body, &target), "good-copy player")?;
    let trees: Vec<Result<(), String>> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let tree = perfect_set_extract(&si, &body, &target, 3, seed).map_err(|e| format!("seed {seed}: {e:?}"))?;
            let leaves = tree.leaves();
            let root = tree.root.copy.scale;
            check(leaves.len() == 8, || format!("seed {seed}: {} leaves", leaves.len()))?;
            check(tree.leaves_pairwise_disjoint(&body), || {
                format!("seed {seed}: leaves overlap")
            })?;
            check(leaves.iter().all(|l| l.scale < root / 8.0), || {
                format!("seed {seed}: a leaf is too large")
            })
        })
        .collect();
    trees.into_iter().collect::<Result<Vec<()>, String>>()?;
    Ok(format!(
        "200 admissible placements with δ ≤ ε ({rejected} rejected, {oversize_rejected} of them oversize); depth-3 extraction on 20 seeds"
    ))
}

/// Points along the boundary of a copy: polygon edges, or circle samples.
fn boundary_walk(body: &ConvexBody, q: &Homothet, per_edge: usize) -> Vec<Vector> {
    let mut out = Vec::new();
    if body.is_ball() {
        for i in 0..(8 * per_edge) {
            let a = 2.0 * PI * i as f64 / (8 * per_edge) as f64;
            out.push(q.apply(&vector(&[a.cos(), a.sin()])));
        }
        return out;
    }
    let vs = body.vertices();
    let m = vs.len();
    for i in 0..m {
        let (a, b) = (&vs[i], &vs[(i + 1) % m]);
        for k in 0..per_edge {
            let t = k as f64 / per_edge as f64;
            out.push(q.apply(&(a * (1.0 - t) + b * t)));
        }
    }
    out
}

fn contact_suite() -> Verdict {
    let round = vec![generators::disk(), ok(ConvexBody::ball(3), "ball")?];
    let polys = planar_polygons()?;
    let mut r = rng::stream(4, 0);
    let (mut singles, mut segs, mut empties) = (0, 0, 0);
    for i in 0..300 {
        let strictly_convex = i % 2 == 0;
        let body = if strictly_convex {
            &round[i / 2 % 2]
        } else {
            &polys[i / 2 % polys.len()]
        };
        let d = body.dim();
        let p = Homothet::new(
            Vector::from_iterator(d, (0..d).map(|_| r.gen_range(-1.0..1.0))),
            r.gen_range(0.5..2.0),
        );
        let s = p.scale * r.gen_range(0.05..0.95);
        // Touching placements push toward a boundary point (a vertex half the time);
        // the others sit strictly inside.
        let touching = r.gen_bool(0.75);
        let v = if !strictly_convex && r.gen_bool(0.5) {
            body.vertices()[r.gen_range(0..body.vertices().len())].clone()
        } else {
            let u = unit(&mut r, d);
            &u * body.ray_exit(&Vector::zeros(d), &u)
        };
        let f = if touching { 1.0 } else { r.gen_range(0.0..0.9) };
        let q = Homothet::new(&p.center + &v * ((p.scale - s) * f), s);
        let c = ok(body.boundary_contact(&p, &q), "contact")?;
        let tol = 1e-9 * p.scale.max(1.0);
        if strictly_convex {
            check(c.pieces() <= 1, || {
                format!("{}: {} contact pieces", body.name(), c.pieces())
            })?;
            if touching {
                match &c {
                    Contact::SinglePoint { point } => {
                        check(
                            (gauge_in(body, &p, point) - 1.0).abs() <= 1e-9
                                && (gauge_in(body, &q, point) - 1.0).abs() <= 1e-9,
                            || format!("{}: contact point {point} is off a boundary", body.name()),
                        )?;
                        singles += 1;
                    }
                    other => return Err(format!("{}: internal tangency gave {other:?}", body.name())),
                }
            } else {
                check(c == Contact::Empty, || {
                    format!("{}: interior copy has contact {c:?}", body.name())
                })?;
                empties += 1;
            }
        } else {
            check(c.pieces() <= 2, || {
                format!("{}: {} contact pieces", body.name(), c.pieces())
            })?;
            if let Contact::SupportingSegments { segments } = &c {
                for sgm in segments {
                    for e in [&sgm.x, &sgm.y] {
                        check(
                            (gauge_in(body, &p, e) - 1.0).abs() <= 1e-9 && (gauge_in(body, &q, e) - 1.0).abs() <= 1e-9,
                            || format!("{}: contact segment end {e} is off a boundary", body.name()),
                        )?;
                    }
                }
                segs += 1;
            } else {
                check(c == Contact::Empty, || format!("{}: planar contact {c:?}", body.name()))?;
                empties += 1;
            }
            // Every boundary point of Q on ∂P must be found.
            for z in boundary_walk(body, &q, 16) {
                if gauge_in(body, &p, &z) >= 1.0 - 1e-12 {
                    check(c.near(body, &q, &z, tol), || {
                        format!("{}: missed contact point {z}", body.name())
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "300 nested pairs: {singles} single points, {segs} segment contacts, {empties} empty"
    ))
}

fn random_subspace(r: &mut rng::Rng, origin: Vector, dirs: usize) -> AffineSubspace {
    let d = origin.len();
    let basis: Vec<Vector> = (0..dirs).map(|_| unit(r, d)).collect();
    AffineSubspace::new(origin, &basis)
}

fn dimension_suite() -> Verdict {
    let mut bodies = vec![
        generators::square(),
        ok(generators::cube(), "cube")?,
        ok(generators::tetrahedron(), "tetrahedron")?,
        ok(generators::prism(), "prism")?,
        ok(generators::non_coplanar_hull(6), "segment hull")?.body,
    ];
    for s in 0..6 {
        bodies.push(ok(
            generators::random_polytope(3, 8 + s as usize, 100 + s),
            "random polytope",
        )?);
        bodies.push(ok(generators::random_polytope(2, 7, 200 + s), "random polygon")?);
    }
    let results: Vec<Result<(usize, usize), String>> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(5, i);
            let body = &bodies[i as usize % bodies.len()];
            let d = body.dim();
            let u = unit(&mut r, d);
            let x = Vector::from_iterator(d, (0..d).map(|_| r.gen_range(-0.5..0.5)));
            let seg = ok(nearest_maximal_chord(body, &u, &x), "maximal chord")?;
            let ext = ok(extremalize(body, &seg), "extremalize")?;
            check(ok(is_extreme_segment(body, &ext.segment), "extremality")?, || {
                format!("{}: result not extreme", body.name())
            })?;
            check(
                (ext.segment.length() - seg.length()).abs() <= 1e-9 * seg.length().max(1.0),
                || {
                    format!(
                        "{}: length changed from {} to {}",
                        body.name(),
                        seg.length(),
                        ext.segment.length()
                    )
                },
            )?;
            check(ext.iterations <= body.facets().len(), || {
                format!("{}: {} iterations", body.name(), ext.iterations)
            })?;
            check(ext.incidence_counts.windows(2).all(|w| w[0] <= w[1]), || {
                format!("{}: incidences fell: {:?}", body.name(), ext.incidence_counts)
            })?;
            let s = ext.segment.clone();
            let extra = r.gen_range(0..d);
            let mut dirs = vec![&s.y - &s.x];
            dirs.extend((0..extra).map(|_| unit(&mut r, d)));
            let sub = AffineSubspace::new(s.x.clone(), &dirs);
            let rep = ok(dimension_bound_check(body, &s, &sub), "dimension check")?;
            check(rep.holds && rep.dim_x + rep.dim_y < rep.dim_s, || {
                format!("{}: {rep:?}", body.name())
            })?;
            Ok((ext.iterations, sub.dim()))
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>, String>>()?;
    let moved = results.iter().filter(|(it, _)| *it > 0).count();

    let mut r = rng::stream(6, 0);
    for _ in 0..500 {
        let o1 = unit(&mut r, 3) * r.gen_range(0.0..2.0);
        let o2 = if r.gen_bool(0.3) {
            o1.clone()
        } else {
            unit(&mut r, 3) * r.gen_range(0.0..2.0)
        };
        let (k1, k2) = (r.gen_range(0..=2), r.gen_range(0..=2));
        let a = random_subspace(&mut r, o1, k1);
        let b = random_subspace(&mut r, o2, k2);
        let h = affine_hull_dim(&a, &b);
        let mut cols: Vec<Vector> = a.basis.clone();
        cols.extend(b.basis.iter().cloned());
        cols.push(&b.origin - &a.origin);
        let m = nalgebra::DMatrix::from_columns(&cols);
        let oracle = m.rank(1e-9);
        check(h == oracle, || format!("hull dimension {h}, matrix rank {oracle}"))?;
        check(h <= a.dim() + b.dim() + 1, || {
            format!("hull dimension {h} > {} + {} + 1", a.dim(), b.dim())
        })?;
    }
    Ok(format!(
        "500 extremalized chords ({moved} translated), bound holds; 500 subspace pairs"
    ))
}

fn pattern_of(f: &ConeFamily, v: &Vector) -> Vec<i8> {
    f.normals.iter().map(|n| if n.dot(v) >= 0.0 { 1 } else { -1 }).collect()
}

fn cone_suite() -> Verdict {
    let mut r = rng::stream(7, 0);
    let mut families = vec![
        ok(
            build_cone_family(&[vector(&[1.0, 0.0]), vector(&[0.0, 1.0])]),
            "quadrants",
        )?,
        ok(
            build_cone_family(&[
                vector(&[1.0, 0.0, 0.0]),
                vector(&[0.0, 1.0, 0.0]),
                vector(&[0.0, 0.0, 1.0]),
            ]),
            "octants",
        )?,
    ];
    for i in 0..20 {
        let d = 2 + i % 2;
        let k = r.gen_range(1..=5);
        let normals: Vec<Vector> = (0..k).map(|_| unit(&mut r, d)).collect();
        families.push(ok(build_cone_family(&normals), "random family")?);
    }
    for i in 0..40 {
        let a = r.gen_range(0.05..PI / 2.0);
        let seeds: Vec<Vector> = (0..i % 3).map(|_| unit(&mut r, 2)).collect();
        let f = ok(refined_family_2d(a, &seeds), "refined family")?;
        let gap = f.max_gap_2d().unwrap_or(PI);
        check(gap < a, || format!("refined family for {a} has gap {gap}"))?;
        for s in &seeds {
            check(f.normals.iter().any(|n| n.dot(s).abs() < 1e-12), || {
                format!("seed {s} missing from the family")
            })?;
        }
        families.push(f);
    }
    let mut vectors = 0;
    for f in &families {
        if f.dim == 2 {
            check(f.cones.len() == f.normals.len(), || {
                format!("{} lines gave {} cones", f.normals.len(), f.cones.len())
            })?;
        }
        for _ in 0..500 {
            let v = unit(&mut r, f.dim) * r.gen_range(1e-3..10.0);
            let m = ok(f.cone_of_vector(&v), "cone membership")?;
            let p = pattern_of(f, &v);
            let signed: Vec<i8> = f.cones[m.cone].iter().map(|&s| s * m.sign).collect();
            check(signed == p, || format!("{v} has pattern {p:?}, assigned {signed:?}"))?;
            let n = ok(f.cone_of_vector(&-&v), "negated membership")?;
            check(n.cone == m.cone && n.sign == -m.sign, || {
                format!("{v} and its negative are not paired")
            })?;
            vectors += 1;
        }
    }

    let outcomes: Vec<Result<bool, String>> = (0..10_000u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(8, i);
            let n = r.gen_range(2..=128);
            let colors = r.gen_range(1..=4);
            let k = r.gen_range(1..=3);
            let pts: Vec<Vector> = (0..n)
                .map(|_| vector(&[r.gen_range(0.0..1.0), r.gen_range(0.0..1.0)]))
                .collect();
            let rad = r.gen_range(0.05..0.6);
            let style = i % 3;
            let fam = build_cone_family(&[unit(&mut r, 2), unit(&mut r, 2)]).ok();
            let noise: Vec<usize> = (0..n * n).map(|_| r.gen_range(1..=colors)).collect();
            let pts2 = pts.clone();
            let data = ok(
                ColoredPointSet::from_fn(pts, colors, rad, k, |a, b| match (style, &fam) {
                    (0, _) => noise[a * n + b],
                    (1, _) => 1 + (((&pts2[a] - &pts2[b]).norm() * 7.0) as usize) % colors,
                    (_, Some(f)) => 1 + f.cone_of(&pts2[a], &pts2[b]).map(|m| m.cone).unwrap_or(0) % colors,
                    _ => noise[a * n + b],
                }),
                "colored set",
            )?;
            let res = ok(thinning_homogeneous(&data), "thinning")?;
            match res.witness {
                Some((b, c)) => {
                    check(verify_partial_homogeneity(&data, &b, c), || {
                        format!("instance {i}: witness fails the predicate")
                    })?;
                    Ok(true)
                }
                None => Ok(false),
            }
        })
        .collect();
    let successes = outcomes
        .into_iter()
        .collect::<Result<Vec<bool>, String>>()?
        .into_iter()
        .filter(|&s| s)
        .count();
    check(successes > 0, || "thinning never succeeded".into())?;

    let family = ok(refined_family_2d(PI / 3.0, &[]), "refined family")?;
    let runs: Vec<Result<bool, String>> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let mut r = rng::stream(9, seed);
            let n = 96;
            let (pts, length): (Vec<Vector>, f64) = if seed % 2 == 0 {
                let pts = (0..n)
                    .map(|_| {
                        let a = r.gen_range(0.0..2.0 * PI);
                        vector(&[a.cos(), a.sin()])
                    })
                    .collect();
                (pts, 2.0 * PI)
            } else {
                let a = vector(&[r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)]);
                let dir = unit(&mut r, 2);
                let pts = (0..n).map(|_| &a + &dir * r.gen_range(0.0..2.0)).collect();
                (pts, 2.0)
            };
            let ct = ConeThinning {
                points: &pts,
                family: &family,
                k: 1,
                r: 6.0 * length / n as f64,
            };
            let res = ok(ct.run(), "cone thinning")?;
            Ok(res.cone.is_some() && ok(ct.verify(&res), "cone verify")?)
        })
        .collect();
    let wins = runs
        .into_iter()
        .collect::<Result<Vec<bool>, String>>()?
        .into_iter()
        .filter(|&w| w)
        .count();
    let rate = wins as f64 / 200.0;
    check(rate >= 0.95, || {
        format!("cone coloring succeeded on {wins}/200 samplings")
    })?;
    Ok(format!(
        "{} families, {vectors} vectors covered and paired; thinning sound on 10000 instances ({successes} successes); cone coloring {wins}/200",
        families.len()
    ))
}

/// A target with accumulating parts: arc samples, a convergent run and stray points.
fn mixed_target(seed: u64) -> Result<TargetSet, String> {
    let mut r = rng::stream(10, seed);
    let spacing = r.gen_range(0.02..0.05);
    let mut pts = Vec::new();
    let a0 = r.gen_range(0.0..2.0 * PI);
    let arc = r.gen_range(10..40);
    let rad = r.gen_range(0.5..1.0);
    for i in 0..arc {
        let a = a0 + spacing * i as f64 / rad;
        pts.push(vector(&[rad * a.cos(), rad * a.sin()]));
    }
    let base = vector(&[r.gen_range(-0.5..0.5), r.gen_range(-0.5..0.5)]);
    let dir = unit(&mut r, 2);
    for j in 0..r.gen_range(0..10) {
        pts.push(&base + &dir * (0.3 * 0.7f64.powi(j)));
    }
    for _ in 0..r.gen_range(0..10) {
        pts.push(vector(&[r.gen_range(-1.5..1.5), r.gen_range(-1.5..1.5)]));
    }
    ok(TargetSet::new(pts, 1.5 * spacing, "mixed"), "mixed target")
}

fn derivative_suite() -> Verdict {
    let start = Instant::now();
    let disk = generators::disk();
    let square = generators::square();
    for body in [&disk, &square] {
        for (n, seed) in [(10, 0), (10, 1), (20, 2), (20, 3)] {
            let t = ok(generators::scatter(n, seed, 2), "scatter")?;
            let tr = ok(rank_trace(body, &t, 1e-6, 8), "rank")?;
            check(tr.rank() == 1 && tr.fixpoint().is_empty(), || {
                format!(
                    "scatter-{n} seed {seed} on {}: rank {} fixpoint {}",
                    body.name(),
                    tr.rank(),
                    tr.fixpoint().len()
                )
            })?;
        }
    }
    let circle = generators::circle(200);
    let tr = ok(rank_trace(&disk, &circle, 1e-6, 4), "circle rank")?;
    check(tr.rank() == 0 && tr.fixpoint().len() == 200, || {
        format!("circle-200: rank {} fixpoint {}", tr.rank(), tr.fixpoint().len())
    })?;
    let deco = generators::circle_decorated(200);
    let tr = ok(rank_trace(&disk, &deco, 1e-6, 6), "decorated rank")?;
    let first: Vec<usize> = tr.stages[0].removed.iter().map(|r| r.index).collect();
    check(first == (200..deco.len()).collect::<Vec<_>>(), || {
        format!("first stage removed {first:?}")
    })?;
    check(tr.fixpoint().len() == 200, || {
        format!("decorated fixpoint {}", tr.fixpoint().len())
    })?;

    let results: Vec<Result<(usize, usize), String>> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let big = mixed_target(seed)?;
            let mut r = rng::stream(11, seed);
            let keep = r.gen_range(0.5..0.95);
            let sub: Vec<usize> = (0..big.len()).filter(|_| r.gen_bool(keep)).collect();
            let small = big.subset(&sub);
            let body = if seed % 2 == 0 { &disk } else { &square };
            let eb = ok(Engine::new(body, &big, DerivativeConfig::default()), "engine")?;
            let es = ok(Engine::new(body, &small, DerivativeConfig::default()), "engine")?;
            let step = es.step(&es.all_alive());
            // Antitone: output within the input, and isolated points always go.
            check(step.kept.len() + step.removed.len() == small.len(), || {
                format!("seed {seed}: points lost")
            })?;
            for (i, p) in small.points.iter().enumerate() {
                let isolated = small
                    .points
                    .iter()
                    .enumerate()
                    .all(|(j, q)| j == i || (p - q).norm() > small.eps);
                if isolated {
                    check(!step.kept.contains(&i), || {
                        format!("seed {seed}: isolated point {i} kept")
                    })?;
                }
            }
            // Monotone: every witness for the smaller target is good for the larger one.
            let all = eb.all_alive();
            for ret in &step.retained {
                let cert = eb.is_good_copy(&ret.witness.copy, &all);
                check(cert.good, || {
                    format!(
                        "seed {seed}: witness for point {} is not good in the superset",
                        ret.index
                    )
                })?;
            }
            let big_kept = eb.step(&all).kept;
            let carried = step.kept.iter().filter(|&&i| big_kept.contains(&sub[i])).count();
            Ok((step.kept.len(), carried))
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>, String>>()?;
    let kept: usize = results.iter().map(|r| r.0).sum();
    let carried: usize = results.iter().map(|r| r.1).sum();
    let secs = start.elapsed().as_secs_f64();
    check(secs < 300.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "scatter rank 1, circle fixed, decoration first; 200 nested pairs ({carried}/{kept} kept points also kept by the full step) in {secs:.1} s"
    ))
}

/// Player II sampling centers in the box of the last I-move instead of the opening.
struct LocalRandom;

impl Strategy for LocalRandom {
    fn tag(&self) -> &str {
        "random-local"
    }

    fn player(&self) -> Player {
        Player::II
    }

    fn propose(&self, state: &GameState, seed: u64) -> Option<Move> {
        let mut r = rng::stream(seed, 1);
        let p = state.last_i_move()?.homothet();
        let (lo, hi) = state.body().bounding_box(&p);
        let u = 1.0 - r.gen::<f64>();
        let c = Vector::from_iterator(lo.len(), (0..lo.len()).map(|k| r.gen_range(lo[k]..=hi[k])));
        Some(Move::new(c, p.scale * 1e-3f64.powf(u), "random"))
    }
}

fn certified(rec: &RunRecord) -> Option<usize> {
    match rec.outcome {
        Outcome::IiCertified { round } => Some(round),
        _ => None,
    }
}

fn ii_moves(rec: &RunRecord) -> usize {
    rec.moves.iter().filter(|m| m.player == Player::II).count()
}

fn matches(
    si: &dyn Strategy,
    sii: &dyn Strategy,
    body: &ConvexBody,
    targets: &[TargetSet],
    horizon: impl Fn(&TargetSet) -> usize + Sync,
    seeds: std::ops::Range<u64>,
) -> Result<Vec<RunRecord>, String> {
    let jobs: Vec<(usize, u64)> = (0..targets.len())
        .flat_map(|t| seeds.clone().map(move |s| (t, s)))
        .collect();
    jobs.par_iter()
        .map(|&(t, s)| {
            let cfg = MatchConfig {
                horizon: horizon(&targets[t]),
                seed: s,
            };
            ok(play_match(si, sii, body, &targets[t], cfg), "match")
        })
        .collect()
}

fn game_suite(info: &mut Vec<String>) -> Verdict {
    let mut records: Vec<RunRecord> = Vec::new();
    let disk = generators::disk();
    let random_i = RandomLegal::new(Player::I);

    let mut worst = 0;
    for seed in 0..100u64 {
        let t = ok(generators::scatter(10, seed, 2), "scatter")?;
        let rec = ok(
            play_match(
                &random_i,
                &EnumerateDeleter,
                &disk,
                &t,
                MatchConfig {
                    horizon: 2 * t.len(),
                    seed,
                },
            ),
            "match",
        )?;
        check(certified(&rec).is_some() && ii_moves(&rec) <= t.len(), || {
            format!(
                "enumerate on scatter seed {seed}: {:?} after {} II-moves",
                rec.outcome,
                ii_moves(&rec)
            )
        })?;
        worst = worst.max(ii_moves(&rec));
        records.push(rec);
    }

    let mut rank_one = 0;
    let ball3 = ok(ConvexBody::ball(3), "ball")?;
    let corpus: Vec<(ConvexBody, Vec<TargetSet>)> = vec![
        (
            disk.clone(),
            (0..5)
                .map(|s| generators::scatter(10, s, 2))
                .chain((5..8).map(|s| generators::scatter(20, s, 2)))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?,
        ),
        (
            generators::square(),
            (0..4)
                .map(|s| generators::scatter(15, s, 2))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?,
        ),
        (
            ball3,
            (0..3)
                .map(|s| generators::scatter(10, s, 3))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?,
        ),
    ];
    for (body, targets) in &corpus {
        for t in targets {
            let tr = ok(rank_trace(body, t, 1e-6, 8), "rank")?;
            check(tr.rank() == 1 && tr.fixpoint().is_empty(), || {
                format!("{} on {}: not rank 1", t.generator, body.name())
            })?;
            let rank = ok(RankReducer::new(body, t), "rank reducer")?;
            let gc = ok(GoodCopyPlayer::new(body, t), "good-copy player")?;
            for si in [&random_i as &dyn Strategy, &gc] {
                let recs = matches(si, &rank, body, std::slice::from_ref(t), |t| 4 * t.len(), 0..5)?;
                for rec in recs {
                    check(certified(&rec).is_some(), || {
                        format!(
                            "rank vs {} on {} seed {}: {:?}",
                            si.tag(),
                            t.generator,
                            rec.seed,
                            rec.outcome
                        )
                    })?;
                    rank_one += 1;
                    records.push(rec);
                }
            }
        }
    }

    let circle = generators::circle(200);
    let gc = ok(GoodCopyPlayer::new(&disk, &circle), "good-copy player")?;
    let rank = ok(RankReducer::new(&disk, &circle), "rank reducer")?;
    let vs_rank = matches(&gc, &rank, &disk, std::slice::from_ref(&circle), |_| 50, 0..10)?;
    for rec in &vs_rank {
        check(certified(rec).is_none(), || {
            format!(
                "rank certified on circle-200 seed {} at round {:?}",
                rec.seed,
                certified(rec)
            )
        })?;
    }
    records.extend(vs_rank);

    let random_ii = RandomLegal::new(Player::II);
    let vs_random = matches(&gc, &random_ii, &disk, std::slice::from_ref(&circle), |_| 30, 0..100)?;
    let survived = vs_random.iter().filter(|r| certified(r).is_none()).count();
    check(survived >= 90, || format!("good-copy player survived {survived}/100"))?;
    records.extend(vs_random);

    let local = matches(&gc, &LocalRandom, &disk, std::slice::from_ref(&circle), |_| 30, 0..100)?;
    let local_survived = local.iter().filter(|r| certified(r).is_none()).count();
    info.push(format!(
        "good-copy player vs random II drawing centers from the last I-move's box: {local_survived}/100 survive at horizon 30"
    ));

    let total = records.len();
    check(records.par_iter().all(|r| r.replays_exactly()), || {
        "a record does not replay".into()
    })?;
    for rec in records.iter().step_by(17) {
        let again: RunRecord = ok(serde_json::from_str(&rec.to_json()), "record parse")?;
        check(again.to_json() == rec.to_json(), || {
            format!("record seed {} is not byte-stable", rec.seed)
        })?;
    }
    let rerun = ok(
        play_match(&gc, &random_ii, &disk, &circle, MatchConfig { horizon: 30, seed: 3 }),
        "rerun",
    )?;
    let first = records
        .iter()
        .find(|r| r.strategy_ii == "random" && r.seed == 3 && r.horizon == 30)
        .map(|r| r.to_json());
    check(first.as_deref() == Some(rerun.to_json().as_str()), || {
        "rerun differs from the recorded match".into()
    })?;

    Ok(format!(
        "enumerate certified 100/100 (at most {worst} II-moves); rank certified {rank_one}/{rank_one} rank-1 matches; 0/10 on circle-200; good-copy survived {survived}/100; {total} records replay"
    ))
}

fn main() {
    let mut info = Vec::new();
    let criteria: Vec<(&str, Box<dyn FnOnce(&mut Vec<String>) -> Verdict>)> = vec![
        ("kernel", Box::new(|_| kernel_suite())),
        ("delta", Box::new(|_| delta_suite())),
        ("scaling-bound", Box::new(|_| scaling_suite())),
        ("contact", Box::new(|_| contact_suite())),
        ("dimension", Box::new(|_| dimension_suite())),
        ("cones", Box::new(|_| cone_suite())),
        ("derivative", Box::new(|_| derivative_suite())),
        ("game", Box::new(game_suite)),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let verdict = run(&mut info);
        let secs = t.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1} s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{secs:.1} s]");
            }
        }
    }
    for line in info {
        println!("INFO {line}");
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
