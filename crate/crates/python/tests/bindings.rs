//! The bindings driven from an embedded interpreter.

use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

fn with_module(code: &str) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "pytubal").unwrap();
        pytubal::register(&m).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("tb", m).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        if let Err(e) = py.run(&code, Some(&globals), None) {
            e.print(py);
            panic!("python code failed");
        }
    });
}

#[test]
fn tensor_round_trip_and_product() {
    with_module(
        r#"
a = tb.Tensor(2, 1, 2, [1, 2, 3, 4j])
assert a.shape == (2, 1, 2)
assert a.get(1, 0, 1) == 4j
assert a.to_list() == [1, 2, 3, 4j]
i = tb.Tensor.identity(2, 2)
assert (i @ a).to_list() == a.to_list()
assert abs(a.frob_norm() - 30 ** 0.5) < 1e-12
"#,
    );
}

#[test]
fn tube_product_is_circular_convolution() {
    with_module(
        r#"
u = tb.Tube([1, 2, 3])
v = tb.Tube([0, 1, 0])
assert all(abs(z - w) < 1e-12 for z, w in zip((u * v).entries(), [3, 1, 2]))
"#,
    );
}

#[test]
fn errors_become_value_errors() {
    with_module(
        r#"
def raises(f):
    try:
        f()
    except ValueError:
        return True
    return False

assert raises(lambda: tb.Tensor(2, 2, 2, [1, 2, 3]))
assert raises(lambda: tb.Tensor.zeros(2, 3, 2) @ tb.Tensor.zeros(2, 3, 2))
assert raises(lambda: tb.solve("cg", tb.Tensor.identity(2, 2), tb.Tensor.zeros(2, 1, 2)))
assert raises(lambda: tb.run_suite("geometry"))
"#,
    );
}

#[test]
fn identity_system_solves_in_one_step() {
    with_module(
        r#"
b = tb.Tensor.random(3, 1, 4, 9)
eye = tb.Tensor.identity(3, 4)
steps = tb.step_parameters(eye)
assert abs(steps["mu_one"] - 1.0) < 1e-12
x, hist = tb.solve("tr", eye, b, alpha=steps["alpha_one"], x_star=b)
assert hist["iterations"] == 1 and hist["stop_reason"] == "tol", hist
assert (x - b).frob_norm() < 1e-12
"#,
    );
}
