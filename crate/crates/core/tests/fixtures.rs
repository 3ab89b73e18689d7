use upslope_core::fixtures::{m3, m3_context, m4, m4_context};
use upslope_core::spectral::{char_series, hodge_polygon, hodge_polygon_minors, newton_polygon, progression_check};
use upslope_core::{CycloElt, Matrix, Q};

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn unitary_times_three(m: &Matrix) -> bool {
    let lhs = m.conj().transpose().mul(m).unwrap();
    let three = CycloElt::from_i64(m.ctx(), 3);
    lhs == Matrix::identity(m.ctx(), m.rows()).scale(&three)
}

#[test]
fn m3_slopes() {
    let ctx = m3_context(30).unwrap();
    let m = m3(&ctx);
    assert!(unitary_times_three(&m));
    let np = newton_polygon(&char_series(&m).unwrap());
    assert_eq!(np.slopes(), vec![q(1, 6), q(1, 2), q(5, 6)]);
    let hp = hodge_polygon(&m).unwrap();
    assert_eq!(hp.slopes(), vec![q(0, 1), q(1, 2), q(1, 1)]);
    assert_eq!(hp, hodge_polygon_minors(&m).unwrap());
    assert_eq!(progression_check(&np, &hp).s0, 2);
}

#[test]
fn m4_slopes() {
    let ctx = m4_context(30).unwrap();
    let m = m4(&ctx);
    assert!(unitary_times_three(&m));
    let np = newton_polygon(&char_series(&m).unwrap());
    assert_eq!(np.slopes(), (0..9).map(|i| q(2 * i + 1, 18)).collect::<Vec<_>>());
    let hp = hodge_polygon(&m).unwrap();
    let half = q(1, 2);
    let expect = [q(0, 1), q(0, 1), q(0, 1), half, half, half, q(1, 1), q(1, 1), q(1, 1)];
    assert_eq!(hp.slopes(), expect.to_vec());
    let prog = progression_check(&np, &hp);
    assert_eq!(prog.s0, 5);
    assert_eq!(prog.s0_non_strict, 6);
    assert_eq!(prog.equalities.first(), Some(&6));
}
