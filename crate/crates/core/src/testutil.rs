//! Shared profiles for unit tests; each is built once per test binary.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::kernel::{build_kernel_profile, KernelProfile};
use crate::ModelParams;

pub fn profile(alpha: f64, beta: f64) -> &'static KernelProfile {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), &'static KernelProfile>>> = OnceLock::new();
    let mut map = CACHE.get_or_init(Default::default).lock().unwrap();
    map.entry((alpha.to_bits(), beta.to_bits())).or_insert_with(|| {
        let p = ModelParams::new(alpha, beta, 1, 1.0).unwrap();
        Box::leak(Box::new(build_kernel_profile(&p, 6).unwrap()))
    })
}
