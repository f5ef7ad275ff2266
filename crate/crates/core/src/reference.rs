//! Published benchmark values for `T = 2`, rows `n = 2, 4, …, 2048`
//! (`n = 2, …, 128` for the residual study).

pub const MESHES: [usize; 11] = [2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048];
pub const RESIDUAL_MESHES: [usize; 7] = [2, 4, 8, 16, 32, 64, 128];

/// Discrete inf-sup constants `c_S` for `ν = 0, 1, 2`.
pub const INFSUP: [[f64; 11]; 3] = [
    [0.411711, 0.211292, 0.106338, 0.053256, 0.026639, 0.013321, 0.006661, 0.003330, 0.001665, 0.000833, 0.000416],
    [0.515034, 0.344142, 0.204556, 0.112324, 0.058935, 0.030192, 0.015281, 0.007687, 0.003855, 0.001931, 0.000966],
    [0.429033, 0.271686, 0.155494, 0.083498, 0.043295, 0.022047, 0.011125, 0.005588, 0.002800, 0.001402, 0.000701],
];

/// Printed `c_S/h` for `ν = 0, 1, 2`.
pub const INFSUP_OVER_H: [[f64; 11]; 3] = [
    [0.412, 0.423, 0.425, 0.426, 0.426, 0.426, 0.426, 0.426, 0.426, 0.426, 0.426],
    [0.515, 0.688, 0.818, 0.899, 0.943, 0.966, 0.978, 0.984, 0.987, 0.988, 0.989],
    [0.429, 0.543, 0.622, 0.668, 0.693, 0.705, 0.712, 0.715, 0.717, 0.718, 0.718],
];

/// `‖u - u_h‖` for `u = sin(πt/4)`, `ν = 0, 1, 2`.
pub const ERROR_SIN: [[f64; 11]; 3] = [
    [3.983e-1, 1.825e-1, 8.971e-2, 4.475e-2, 2.238e-2, 1.120e-2, 5.599e-3, 2.800e-3, 1.400e-3, 7.001e-4, 3.501e-4],
    [2.605e-2, 5.933e-3, 1.448e-3, 3.599e-4, 8.984e-5, 2.245e-5, 5.613e-6, 1.403e-6, 3.508e-7, 8.769e-8, 2.192e-8],
    [3.893e-3, 5.465e-4, 7.051e-5, 8.885e-6, 1.113e-6, 1.392e-7, 1.740e-8, 2.175e-9, 2.719e-10, 3.398e-11, 4.236e-12],
];

/// `‖u - u_h‖` for `u = t^{2/3}`.
pub const ERROR_POW: [[f64; 11]; 3] = [
    [4.796e-1, 2.921e-1, 1.783e-1, 1.093e-1, 6.741e-2, 4.181e-2, 2.605e-2, 1.628e-2, 1.021e-2, 6.408e-3, 4.028e-3],
    [1.597e-1, 9.222e-2, 5.506e-2, 3.369e-2, 2.090e-2, 1.306e-2, 8.195e-3, 5.152e-3, 3.243e-3, 2.042e-3, 1.286e-3],
    [6.268e-2, 3.693e-2, 2.237e-2, 1.381e-2, 8.604e-3, 5.391e-3, 3.387e-3, 2.131e-3, 1.341e-3, 8.447e-4, 5.320e-4],
];

/// `‖u - u_h‖` for `u = t(2-t)^{2/3}`.
pub const ERROR_BUBBLE: [[f64; 11]; 3] = [
    [8.327e-1, 3.980e-1, 1.968e-1, 9.852e-2, 4.951e-2, 2.490e-2, 1.252e-2, 6.287e-3, 3.156e-3, 1.583e-3, 7.936e-4],
    [1.506e-1, 5.054e-2, 1.823e-2, 7.180e-3, 3.000e-3, 1.295e-3, 5.677e-4, 2.510e-4, 1.114e-4, 4.952e-5, 2.204e-5],
    [3.061e-2, 1.221e-2, 5.210e-3, 2.271e-3, 1.001e-3, 4.433e-4, 1.969e-4, 8.760e-5, 3.899e-5, 1.736e-5, 7.733e-6],
];

/// Asymptotic convergence orders of the three error studies per degree.
pub const ORDER_SIN: [f64; 3] = [1.0, 2.0, 3.0];
pub const ORDER_POW: [f64; 3] = [0.67, 0.67, 0.67];
pub const ORDER_BUBBLE: [f64; 3] = [1.00, 1.17, 1.17];

/// `‖Q_h H_T^{-1}(u - Q_h u)‖` for `t³ - 10t²` and `t³ - 10t`.
pub const RESIDUAL_CUBIC_A: [f64; 7] =
    [1.86270658, 0.45239154, 0.11030583, 0.02713342, 0.00671882, 0.00167065, 0.00041642];
pub const RESIDUAL_CUBIC_B: [f64; 7] =
    [1.80230151, 0.63072107, 0.21675270, 0.07528792, 0.02637954, 0.00928626, 0.00327641];

/// `(c_S(u_h - Q_h u), ‖Q_h H_T^{-1}(u_h - Q_h u)‖)` for `sin(πt/4)`.
pub const RESIDUAL_SIN: [[f64; 11]; 2] = [
    [4.290e-1, 3.437e-1, 2.432e-1, 1.700e-1, 1.193e-1, 8.403e-2, 5.931e-2, 4.190e-2, 2.961e-2, 2.093e-2, 1.480e-2],
    [1.411e-1, 4.922e-2, 1.691e-2, 5.888e-3, 2.067e-3, 7.284e-4, 2.572e-4, 9.086e-5, 3.211e-5, 1.135e-5, 4.013e-6],
];

/// Same quantities for `t^{2/3}`.
pub const RESIDUAL_POW: [[f64; 11]; 2] = [
    [4.467e-1, 2.990e-1, 2.055e-1, 1.433e-1, 1.006e-1, 7.090e-2, 5.005e-2, 3.536e-2, 2.499e-2, 1.767e-2, 1.249e-2],
    [1.629e-1, 7.255e-2, 3.233e-2, 1.440e-2, 6.415e-3, 2.858e-3, 1.273e-3, 5.670e-4, 2.526e-4, 1.125e-4, 5.012e-5],
];

/// Same quantities for `t(2-t)^{2/3}`.
pub const RESIDUAL_BUBBLE: [[f64; 11]; 2] = [
    [4.128e-1, 3.391e-1, 2.599e-1, 1.952e-1, 1.476e-1, 1.138e-1, 9.009e-2, 7.326e-2, 6.106e-2, 5.193e-2, 4.485e-2],
    [3.040e-1, 1.104e-1, 3.968e-2, 1.442e-2, 5.353e-3, 2.042e-3, 8.022e-4, 3.247e-4, 1.349e-4, 5.724e-5, 2.468e-5],
];

/// Printed eoc columns of the `t(2-t)^{2/3}` residual study (rows 2..).
pub const RESIDUAL_BUBBLE_EOC: [[f64; 10]; 2] = [
    [0.28, 0.38, 0.41, 0.40, 0.37, 0.34, 0.30, 0.26, 0.23, 0.21],
    [1.46, 1.48, 1.46, 1.43, 1.39, 1.35, 1.31, 1.27, 1.24, 1.21],
];
