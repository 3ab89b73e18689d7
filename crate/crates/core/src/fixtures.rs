//! Published weight-two `U_3` matrices at levels `27` and `81`, as exponents of `ζ`.

use alloc::sync::Arc;

use crate::error::Result;
use crate::matrix::Matrix;
use crate::padic::{CycloElt, PadicContext};

/// Exponents of `ζ_9`; level `3^3`.
pub const M3: [[u32; 3]; 3] = [[1, 2, 8], [4, 2, 5], [7, 2, 2]];

/// Exponents of `ζ_27`; level `3^4`. `None` is a zero entry.
pub const M4: [[Option<u32>; 9]; 9] = {
    const N: Option<u32> = None;
    const fn z(k: u32) -> Option<u32> {
        Some(k)
    }
    [
        [z(19), N, N, N, z(2), z(17), N, N, N],
        [N, N, N, z(13), N, N, N, z(20), z(23)],
        [N, z(11), z(2), N, N, N, z(7), N, N],
        [z(1), N, N, N, z(2), z(8), N, N, N],
        [N, N, N, z(22), N, N, N, z(20), z(14)],
        [N, z(11), z(20), N, N, N, z(16), N, N],
        [z(10), N, N, N, z(2), z(26), N, N, N],
        [N, N, N, z(4), N, N, N, z(20), z(5)],
        [N, z(11), z(11), N, N, N, z(25), N, N],
    ]
};

pub fn m3_context(prec: u32) -> Result<Arc<PadicContext>> {
    PadicContext::new(3, 3, prec, Some(9))
}

pub fn m4_context(prec: u32) -> Result<Arc<PadicContext>> {
    PadicContext::new(3, 4, prec, Some(27))
}

pub fn m3(ctx: &Arc<PadicContext>) -> Matrix {
    Matrix::from_fn(ctx, 3, 3, |i, j| CycloElt::zeta_pow(ctx, i64::from(M3[i][j])))
}

pub fn m4(ctx: &Arc<PadicContext>) -> Matrix {
    Matrix::from_fn(ctx, 9, 9, |i, j| match M4[i][j] {
        Some(k) => CycloElt::zeta_pow(ctx, i64::from(k)),
        None => CycloElt::zero(ctx),
    })
}
