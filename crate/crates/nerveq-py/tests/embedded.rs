//! Runs the Python smoke script against this build of the module inside an
//! embedded interpreter.

use std::ffi::CString;
use std::path::PathBuf;

use pyo3::prelude::*;

#[test]
fn smoke_script() {
    pyo3::append_to_inittab!(nerveq_module);
    Python::initialize();
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../python/smoke_test.py");
    let code = format!(
        "import sys, runpy\nsys.modules.pop('nerveq', None)\nrunpy.run_path({:?}, run_name='__main__')",
        script.to_string_lossy()
    );
    Python::attach(|py| {
        let code = CString::new(code).unwrap();
        if let Err(e) = py.run(&code, None, None) {
            let tb = e.traceback(py).and_then(|t| t.format().ok()).unwrap_or_default();
            panic!("smoke script failed: {tb}{e}");
        }
    });
}

use nerveq_py::nerveq_module;
