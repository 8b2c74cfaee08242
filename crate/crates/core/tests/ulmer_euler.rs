use ffrace::curve::ulmer_curve;
use ffrace::field::make_field;
use ffrace::lpoly::{compute_lpolynomial, LOptions};
use ffrace::ulmer::{closed_form_l, l_degree, validate};

/// Every valid Ulmer curve with q <= 9 and L-degree <= 8: place counting versus closed form.
#[test]
fn closed_form_matches_place_counts() {
    let mut checked = 0;
    for (p, k) in [(3u64, 1u32), (5, 1), (7, 1), (3, 2)] {
        let f = make_field(p, k).unwrap();
        for d in 1..=60u64 {
            let Ok(s) = validate(p, k, d) else { continue };
            let n = l_degree(&s) as usize;
            if n > 8 {
                continue;
            }
            let e = ulmer_curve(&f, d as usize).unwrap();
            let opts = LOptions {
                degree_hint: Some(n),
                max_residue_field: 1 << 20,
                extra_checks: 1,
            };
            let lc = compute_lpolynomial(&e, &opts).unwrap();
            assert_eq!(lc.lpoly, closed_form_l(&s).unwrap(), "p={p} k={k} d={d}");
            checked += 1;
        }
    }
    assert_eq!(checked, 21);
}
