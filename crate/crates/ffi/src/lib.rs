//! C ABI for msn-core.
//!
//! Every fallible function returns an [`MsnStatus`]; on failure the message
//! is available from [`msn_last_error`] on the same thread. Objects are
//! opaque handles created by `*_new`/`*_from_json` and released by the
//! matching `*_free`. Strings returned by the library are released with
//! [`msn_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use msn_core::harness::{self, ExperimentConfig};
use msn_core::msn::{init_pool_with, Pool, RoleTag};
use msn_core::objectives::BenchmarkFunction;
use msn_core::optimizer::Optimizer;
use msn_core::vecmath::canberra_distance;
use msn_core::{Error, Msn, MsnConfig, Network, NetworkSpec, ParameterVector, RngHandle};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    DimensionMismatch = 4,
    NonFiniteValue = 5,
    ParseError = 6,
    IoError = 7,
    UnknownName = 8,
    /// A call was made in the wrong order, e.g. asking for the elite before
    /// any rewards were reported.
    InvalidState = 9,
    Panic = 10,
}

impl From<&Error> for MsnStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Dimension { .. } => MsnStatus::DimensionMismatch,
            Error::Argument(_) => MsnStatus::InvalidArgument,
            Error::Config(_) | Error::Build { .. } => MsnStatus::InvalidConfig,
            Error::Evaluation { .. } => MsnStatus::NonFiniteValue,
            Error::Generation { source, .. } => MsnStatus::from(source.as_ref()),
            Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => MsnStatus::ParseError,
            Error::Io { .. } => MsnStatus::IoError,
            Error::Unknown { .. } => MsnStatus::UnknownName,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: MsnStatus, msg: impl Into<String>) -> MsnStatus {
    set_error(msg);
    status
}

fn from_err(e: Error) -> MsnStatus {
    let status = MsnStatus::from(&e);
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into [`MsnStatus::Panic`].
fn guard(f: impl FnOnce() -> MsnStatus) -> MsnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            fail(MsnStatus::Panic, msg)
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, MsnStatus> {
    if p.is_null() {
        return Err(fail(MsnStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(MsnStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], MsnStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(MsnStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_slice<'a>(p: *mut f64, len: usize, want: usize, what: &str) -> Result<&'a mut [f64], MsnStatus> {
    if len != want {
        return Err(fail(
            MsnStatus::DimensionMismatch,
            format!("{what} has length {len}, expected {want}"),
        ));
    }
    if want == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(fail(MsnStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

macro_rules! check_out {
    ($p:expr, $what:expr) => {
        if $p.is_null() {
            return fail(MsnStatus::NullPointer, concat!($what, " is null"));
        }
    };
}

static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
    Ok(s) => s,
    Err(_) => panic!("version string"),
};

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn msn_version() -> *const c_char {
    VERSION.as_ptr()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn msn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn msn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Canberra distance between two vectors of length `len`.
///
/// # Safety
/// `x` and `y` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_canberra(x: *const f64, y: *const f64, len: usize, out: *mut f64) -> MsnStatus {
    guard(|| {
        check_out!(out, "out");
        let x = tri!(slice_arg(x, len, "x"));
        let y = tri!(slice_arg(y, len, "y"));
        match canberra_distance(x, y) {
            Ok(d) => {
                *out = d;
                MsnStatus::Ok
            }
            Err(e) => from_err(e),
        }
    })
}

/// Value of the named benchmark function at `(x, y)`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_benchmark_eval(name: *const c_char, x: f64, y: f64, out: *mut f64) -> MsnStatus {
    guard(|| {
        check_out!(out, "out");
        let name = tri!(str_arg(name, "name"));
        match BenchmarkFunction::by_name(name) {
            Ok(f) => {
                *out = f.evaluate(x, y);
                MsnStatus::Ok
            }
            Err(e) => from_err(e),
        }
    })
}

/// Known global minimum of the named benchmark function.
///
/// # Safety
/// `name` must be a NUL-terminated string; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_benchmark_optimum(
    name: *const c_char,
    value: *mut f64,
    x: *mut f64,
    y: *mut f64,
) -> MsnStatus {
    guard(|| {
        check_out!(value, "value");
        check_out!(x, "x");
        check_out!(y, "y");
        let name = tri!(str_arg(name, "name"));
        match BenchmarkFunction::by_name(name) {
            Ok(f) => {
                *value = f.optimum_value;
                *x = f.optimum_location.0;
                *y = f.optimum_location.1;
                MsnStatus::Ok
            }
            Err(e) => from_err(e),
        }
    })
}

/// Optimizer hyperparameters.
pub struct MsnConfigHandle(MsnConfig);

/// Default hyperparameters. Never NULL.
#[no_mangle]
pub extern "C" fn msn_config_default() -> *mut MsnConfigHandle {
    Box::into_raw(Box::new(MsnConfigHandle(MsnConfig::default())))
}

/// Parse hyperparameters from JSON; missing fields take their defaults.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_config_from_json(json: *const c_char, out: *mut *mut MsnConfigHandle) -> MsnStatus {
    guard(|| {
        check_out!(out, "out");
        let text = tri!(str_arg(json, "json"));
        let config: MsnConfig = match serde_json::from_str(text) {
            Ok(c) => c,
            Err(e) => return from_err(e.into()),
        };
        if let Err(e) = config.validate() {
            return from_err(e);
        }
        *out = Box::into_raw(Box::new(MsnConfigHandle(config)));
        MsnStatus::Ok
    })
}

/// Hyperparameters as a JSON string, to be released with
/// [`msn_string_free`].
///
/// # Safety
/// `config` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_config_to_json(config: *const MsnConfigHandle, out: *mut *mut c_char) -> MsnStatus {
    guard(|| {
        check_out!(out, "out");
        let Some(config) = config.as_ref() else {
            return fail(MsnStatus::NullPointer, "config is null");
        };
        let text = serde_json::to_string(&config.0).expect("config serializes");
        *out = CString::new(text).expect("JSON has no NUL").into_raw();
        MsnStatus::Ok
    })
}

/// # Safety
/// `config` must come from this library and not have been freed. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn msn_config_free(config: *mut MsnConfigHandle) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// A fixed-topology network; parameters live outside it.
pub struct MsnNetwork(Network);

/// Build a network from its JSON layer description.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_network_from_json(json: *const c_char, out: *mut *mut MsnNetwork) -> MsnStatus {
    guard(|| {
        check_out!(out, "out");
        let text = tri!(str_arg(json, "json"));
        match NetworkSpec::from_json(text).and_then(|s| Network::build(&s)) {
            Ok(net) => {
                *out = Box::into_raw(Box::new(MsnNetwork(net)));
                MsnStatus::Ok
            }
            Err(e) => from_err(e),
        }
    })
}

/// The 2-input, 2-output benchmark network. Never NULL.
#[no_mangle]
pub extern "C" fn msn_network_benchmark() -> *mut MsnNetwork {
    let net = Network::build(&NetworkSpec::task1()).expect("builtin spec is valid");
    Box::into_raw(Box::new(MsnNetwork(net)))
}

/// # Safety
/// `net` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn msn_network_parameter_count(net: *const MsnNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.parameter_count())
}

/// # Safety
/// `net` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn msn_network_input_len(net: *const MsnNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.input_len())
}

/// # Safety
/// `net` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn msn_network_output_len(net: *const MsnNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.0.output_len())
}

/// Seeded Xavier-normal parameters; `len` must equal the parameter count.
///
/// # Safety
/// `net` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn msn_network_init_params(
    net: *const MsnNetwork,
    seed: u64,
    out: *mut f64,
    len: usize,
) -> MsnStatus {
    guard(|| {
        let Some(net) = net.as_ref() else {
            return fail(MsnStatus::NullPointer, "net is null");
        };
        let out = tri!(out_slice(out, len, net.0.parameter_count(), "out"));
        out.copy_from_slice(&net.0.init_params(RngHandle::from_seed(seed)));
        MsnStatus::Ok
    })
}

/// Forward pass of one input.
///
/// # Safety
/// Pointers must reference the stated number of doubles; `output_len` must
/// equal the network's output length.
#[no_mangle]
pub unsafe extern "C" fn msn_network_forward(
    net: *const MsnNetwork,
    params: *const f64,
    params_len: usize,
    input: *const f64,
    input_len: usize,
    output: *mut f64,
    output_len: usize,
) -> MsnStatus {
    guard(|| {
        let Some(net) = net.as_ref() else {
            return fail(MsnStatus::NullPointer, "net is null");
        };
        let params = tri!(slice_arg(params, params_len, "params"));
        let input = tri!(slice_arg(input, input_len, "input"));
        let output = tri!(out_slice(output, output_len, net.0.output_len(), "output"));
        match net.0.forward(params, input) {
            Ok(y) => {
                output.copy_from_slice(&y);
                MsnStatus::Ok
            }
            Err(e) => from_err(e),
        }
    })
}

/// # Safety
/// `net` must come from this library and not have been freed. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn msn_network_free(net: *mut MsnNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Ask/tell optimizer: read candidates with [`msn_optimizer_candidate`],
/// evaluate them however you like, report rewards (higher is better) with
/// [`msn_optimizer_tell`].
pub struct MsnOptimizer {
    msn: Msn,
    dim: usize,
}

fn new_optimizer(config: &MsnConfig, pool: Pool, seed: u64) -> *mut MsnOptimizer {
    let dim = pool.members[0].len();
    let msn = Msn::with_pool(config.clone(), pool, RngHandle::from_seed(seed));
    Box::into_raw(Box::new(MsnOptimizer { msn, dim }))
}

/// Optimizer whose first pool is drawn from `net`'s initialization scheme.
///
/// # Safety
/// `config` and `net` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_optimizer_new(
    config: *const MsnConfigHandle,
    net: *const MsnNetwork,
    seed: u64,
    out: *mut *mut MsnOptimizer,
) -> MsnStatus {
    guard(|| {
        check_out!(out, "out");
        let (Some(config), Some(net)) = (config.as_ref(), net.as_ref()) else {
            return fail(MsnStatus::NullPointer, "config or net is null");
        };
        let rng = RngHandle::from_seed(seed);
        match init_pool_with(&config.0, rng, |h| net.0.init_params(h)) {
            Ok(pool) => {
                *out = new_optimizer(&config.0, pool, seed);
                MsnStatus::Ok
            }
            Err(e) => from_err(e),
        }
    })
}

/// Optimizer starting from caller-supplied candidates: `pool` holds
/// `pool_size` rows of `dim` doubles, row-major.
///
/// # Safety
/// `config` must be a live handle; `pool` must point to `pool_size * dim`
/// readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_optimizer_new_with_pool(
    config: *const MsnConfigHandle,
    pool: *const f64,
    pool_size: usize,
    dim: usize,
    seed: u64,
    out: *mut *mut MsnOptimizer,
) -> MsnStatus {
    guard(|| {
        check_out!(out, "out");
        let Some(config) = config.as_ref() else {
            return fail(MsnStatus::NullPointer, "config is null");
        };
        if let Err(e) = config.0.validate() {
            return from_err(e);
        }
        if pool_size != config.0.pool_size {
            return fail(
                MsnStatus::DimensionMismatch,
                format!("{pool_size} rows supplied for a pool of {}", config.0.pool_size),
            );
        }
        if dim == 0 {
            return fail(MsnStatus::InvalidArgument, "dim must be positive");
        }
        let Some(total) = pool_size.checked_mul(dim) else {
            return fail(MsnStatus::InvalidArgument, "pool_size * dim overflows");
        };
        let flat = tri!(slice_arg(pool, total, "pool"));
        let members: Vec<ParameterVector> = flat.chunks(dim).map(|r| ParameterVector::new(r.to_vec())).collect();
        if members.iter().any(|m| !m.is_finite()) {
            return fail(MsnStatus::NonFiniteValue, "pool contains a non-finite value");
        }
        let pool = Pool {
            roles: vec![RoleTag::Initial; members.len()],
            members,
        };
        *out = new_optimizer(&config.0, pool, seed);
        MsnStatus::Ok
    })
}

/// # Safety
/// `opt` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn msn_optimizer_pool_size(opt: *const MsnOptimizer) -> usize {
    opt.as_ref().map_or(0, |o| o.msn.pool_size())
}

/// # Safety
/// `opt` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn msn_optimizer_dim(opt: *const MsnOptimizer) -> usize {
    opt.as_ref().map_or(0, |o| o.dim)
}

/// Generations completed so far.
///
/// # Safety
/// `opt` must be a live handle or NULL (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn msn_optimizer_generation(opt: *const MsnOptimizer) -> usize {
    opt.as_ref().map_or(0, |o| o.msn.state().generation)
}

/// Copy candidate `index` of the current pool into `out` (`len` = dim).
///
/// # Safety
/// `opt` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn msn_optimizer_candidate(
    opt: *const MsnOptimizer,
    index: usize,
    out: *mut f64,
    len: usize,
) -> MsnStatus {
    guard(|| {
        let Some(opt) = opt.as_ref() else {
            return fail(MsnStatus::NullPointer, "opt is null");
        };
        let pool = opt.msn.pool();
        if index >= pool.len() {
            return fail(
                MsnStatus::InvalidArgument,
                format!("index {index} out of range for a pool of {}", pool.len()),
            );
        }
        let out = tri!(out_slice(out, len, opt.dim, "out"));
        out.copy_from_slice(&pool.members[index]);
        MsnStatus::Ok
    })
}

/// Report one reward per candidate, in pool order, and advance a
/// generation.
///
/// # Safety
/// `opt` must be a live handle; `rewards` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn msn_optimizer_tell(opt: *mut MsnOptimizer, rewards: *const f64, len: usize) -> MsnStatus {
    guard(|| {
        let Some(opt) = opt.as_mut() else {
            return fail(MsnStatus::NullPointer, "opt is null");
        };
        let rewards = tri!(slice_arg(rewards, len, "rewards"));
        if len != opt.msn.pool_size() {
            return fail(
                MsnStatus::DimensionMismatch,
                format!("{len} rewards for a pool of {}", opt.msn.pool_size()),
            );
        }
        match opt.msn.tell(rewards) {
            Ok(_) => MsnStatus::Ok,
            Err(e) => from_err(e),
        }
    })
}

/// Best candidate reported so far and its reward.
///
/// # Safety
/// `opt` must be a live handle; `out` must point to `len` writable doubles;
/// `reward` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_optimizer_elite(
    opt: *const MsnOptimizer,
    out: *mut f64,
    len: usize,
    reward: *mut f64,
) -> MsnStatus {
    guard(|| {
        check_out!(reward, "reward");
        let Some(opt) = opt.as_ref() else {
            return fail(MsnStatus::NullPointer, "opt is null");
        };
        let Some((params, r)) = opt.msn.elite() else {
            return fail(MsnStatus::InvalidState, "no rewards reported yet");
        };
        let out = tri!(out_slice(out, len, opt.dim, "out"));
        out.copy_from_slice(params);
        *reward = r;
        MsnStatus::Ok
    })
}

/// Current integrity in `[0, 1]`.
///
/// # Safety
/// `opt` must be a live handle or NULL (which yields NaN).
#[no_mangle]
pub unsafe extern "C" fn msn_optimizer_integrity(opt: *const MsnOptimizer) -> f64 {
    opt.as_ref().map_or(f64::NAN, |o| o.msn.state().integrity)
}

/// # Safety
/// `opt` must come from this library and not have been freed. NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn msn_optimizer_free(opt: *mut MsnOptimizer) {
    if !opt.is_null() {
        drop(Box::from_raw(opt));
    }
}

/// Run a whole experiment described by JSON and return the result record
/// as JSON in `out` (release with [`msn_string_free`]). Individual trial
/// failures are reported inside the record, not as a status.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn msn_run_experiment_json(config_json: *const c_char, out: *mut *mut c_char) -> MsnStatus {
    guard(|| {
        check_out!(out, "out");
        let text = tri!(str_arg(config_json, "config_json"));
        let record = match ExperimentConfig::from_json_str(text).and_then(|c| harness::run_experiment(&c)) {
            Ok(r) => r,
            Err(e) => return from_err(e),
        };
        let json = serde_json::to_string(&record).expect("record serializes");
        *out = CString::new(json).expect("JSON has no NUL").into_raw();
        MsnStatus::Ok
    })
}
