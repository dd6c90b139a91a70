//! Joint spectral matrix `L_jk = sinc(phi(w_j, w_k)) alpha(w_j + w_k)`.

use std::io::{self, Read, Write};

use nalgebra::DMatrix;

use crate::dispersion::{pump_wavenumber, signal_wavenumber, CrystalConfig, SellmeierCoefficients};
use crate::pump::{FrequencyGrid, PumpProfile};
use crate::{Error, Result, C64};

/// `sin(x) / x` with a series branch near the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Phase-matching factor `sinc(phi_jk)` for one grid and crystal, reusable
/// across pump profiles.
#[derive(Clone, Debug)]
pub struct PhaseMatching {
    sinc: DMatrix<f64>,
    pump_axis: Vec<f64>,
}

impl PhaseMatching {
    pub fn new(grid: &FrequencyGrid, crystal: &CrystalConfig, coeffs: &SellmeierCoefficients) -> Result<Self> {
        crystal.validate()?;
        let n = grid.len();
        let pump_axis = grid.pump_axis();
        let ks = grid
            .omegas()
            .iter()
            .map(|&w| signal_wavenumber(w, crystal.theta, coeffs))
            .collect::<Result<Vec<_>>>()?;
        let kp = pump_axis
            .iter()
            .map(|&w| pump_wavenumber(w, coeffs))
            .collect::<Result<Vec<_>>>()?;
        let half_length = crystal.length / 2.0;
        let mut sinc_matrix = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in j..n {
                let value = sinc((kp[j + k] - ks[j] - ks[k]) * half_length);
                sinc_matrix[(j, k)] = value;
                sinc_matrix[(k, j)] = value;
            }
        }
        Ok(Self {
            sinc: sinc_matrix,
            pump_axis,
        })
    }

    pub fn len(&self) -> usize {
        self.sinc.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.sinc.nrows() == 0
    }

    pub fn sinc_matrix(&self) -> &DMatrix<f64> {
        &self.sinc
    }

    pub fn pump_axis(&self) -> &[f64] {
        &self.pump_axis
    }

    pub fn jsa(&self, pump: &PumpProfile) -> Result<JointSpectralMatrix> {
        self.check_axis(pump.axis())?;
        let alpha = pump.amplitudes();
        let n = self.len();
        let matrix = DMatrix::from_fn(n, n, |j, k| alpha[j + k] * self.sinc[(j, k)]);
        Ok(JointSpectralMatrix { matrix })
    }

    fn check_axis(&self, axis: &[f64]) -> Result<()> {
        if axis.len() != self.pump_axis.len() {
            return Err(Error::Config(format!(
                "pump sampled on {} points but the grid needs {} pump frequencies",
                axis.len(),
                self.pump_axis.len()
            )));
        }
        for (got, want) in axis.iter().zip(&self.pump_axis) {
            if (got - want).abs() > 1e-9 * want.abs() {
                return Err(Error::Config(format!(
                    "pump axis does not cover the grid sums (found {got}, expected {want})"
                )));
            }
        }
        Ok(())
    }
}

/// Complex symmetric coupling matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct JointSpectralMatrix {
    matrix: DMatrix<C64>,
}

impl JointSpectralMatrix {
    /// Wraps an existing matrix after checking exact symmetry.
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("joint spectral matrix must be square".into()));
        }
        if matrix != matrix.transpose() {
            return Err(Error::Contract("joint spectral matrix must be symmetric".into()));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }

    pub fn magnitude(&self) -> DMatrix<f64> {
        self.matrix.map(|z| z.norm())
    }

    /// Row-major little-endian `(re, im)` f64 pairs.
    pub fn write_binary<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.len();
        for j in 0..n {
            for k in 0..n {
                let z = self.matrix[(j, k)];
                out.write_all(&z.re.to_le_bytes())?;
                out.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R, n: usize) -> io::Result<DMatrix<C64>> {
        let mut buf = [0u8; 8];
        let mut next = || -> io::Result<f64> {
            input.read_exact(&mut buf)?;
            Ok(f64::from_le_bytes(buf))
        };
        let mut matrix = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let re = next()?;
                let im = next()?;
                matrix[(j, k)] = C64::new(re, im);
            }
        }
        Ok(matrix)
    }
}

pub fn build_jsa(
    grid: &FrequencyGrid,
    pump: &PumpProfile,
    crystal: &CrystalConfig,
    coeffs: &SellmeierCoefficients,
) -> Result<JointSpectralMatrix> {
    PhaseMatching::new(grid, crystal, coeffs)?.jsa(pump)
}

/// `sum_jk |L_jk|^2`, which equals the sum of the squared gains.
pub fn total_gain_invariant(l: &DMatrix<C64>) -> f64 {
    l.iter().map(|z| z.norm_sqr()).sum()
}
