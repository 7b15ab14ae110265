//! Criterion benchmarks for the qclab kernels; see benches/.
