//! JSON interchange documents: `zerodata-v1`, `seqspec-v1`, `cloud-v1` and
//! `kernel-v1`. Parsing is strict (unknown fields are rejected) and every
//! document converts to and from the library types.

use crate::efun::{FiniteOrderFunction, ProductForm, ZeroEntry};
use crate::error::{Error, Result};
use crate::laplace::{Kernel, KernelRepr};
use crate::potential::PointCloud;
use crate::seqlab::SequenceSpec;
use crate::series::GroupedSeries;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroJson {
    pub re: f64,
    pub im: f64,
    pub mult: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormJson {
    #[default]
    Primary,
    Plain,
}

/// `zerodata-v1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub leading: ComplexJson,
    pub origin_mult: u32,
    #[serde(default)]
    pub expoly: Vec<ComplexJson>,
    pub genus: u32,
    #[serde(default)]
    pub zeros: Vec<ZeroJson>,
    /// Absent means primary factors.
    #[serde(default, skip_serializing_if = "is_primary")]
    pub form: FormJson,
}

fn is_primary(f: &FormJson) -> bool {
    *f == FormJson::Primary
}

pub const ZERODATA_V1: &str = "zerodata-v1";
pub const SEQSPEC_V1: &str = "seqspec-v1";
pub const CLOUD_V1: &str = "cloud-v1";
pub const KERNEL_V1: &str = "kernel-v1";

fn check_tag(found: &Option<String>, expected: &str) -> Result<()> {
    match found {
        Some(s) if s != expected => Err(Error::invalid(format!(
            "field `schema`: expected \"{expected}\", got \"{s}\""
        ))),
        _ => Ok(()),
    }
}

impl ZeroData {
    /// A zero leading coefficient encodes the identically zero function.
    pub fn to_function(&self) -> Result<FiniteOrderFunction> {
        check_tag(&self.schema, ZERODATA_V1)?;
        let leading = Complex64::from(self.leading);
        if leading.norm() == 0.0 {
            if self.origin_mult != 0 || !self.expoly.is_empty() || !self.zeros.is_empty() {
                return Err(Error::invalid(
                    "field `leading`: zero leading coefficient with further data",
                ));
            }
            return Ok(FiniteOrderFunction::zero());
        }
        let zeros = self
            .zeros
            .iter()
            .enumerate()
            .map(|(i, z)| {
                ZeroEntry::new(Complex64::new(z.re, z.im), z.mult)
                    .map_err(|e| Error::invalid(format!("field `zeros[{i}]`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let form = match self.form {
            FormJson::Primary => ProductForm::Primary,
            FormJson::Plain => ProductForm::Plain,
        };
        FiniteOrderFunction::with_form(
            leading,
            self.origin_mult,
            self.expoly.iter().map(|&c| c.into()).collect(),
            self.genus,
            zeros,
            form,
        )
    }

    pub fn from_function(f: &FiniteOrderFunction) -> Self {
        ZeroData {
            schema: Some(ZERODATA_V1.into()),
            leading: f.leading().into(),
            origin_mult: f.origin_mult(),
            expoly: f.expoly().iter().map(|&c| c.into()).collect(),
            genus: f.genus(),
            zeros: f
                .zeros()
                .iter()
                .map(|z| ZeroJson {
                    re: z.location().re,
                    im: z.location().im,
                    mult: z.multiplicity(),
                })
                .collect(),
            form: match f.form() {
                ProductForm::Primary => FormJson::Primary,
                ProductForm::Plain => FormJson::Plain,
            },
        }
    }
}

/// Optional `series` block of a `seqspec-v1` document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesBlock {
    pub exponents: Vec<u32>,
    /// Points where pointwise convergence is probed.
    #[serde(default, rename = "E_samples", skip_serializing_if = "Vec::is_empty")]
    pub e_samples: Vec<ComplexJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionJson>,
}

/// Parameters of the uniform-convergence disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionJson {
    #[serde(rename = "C")]
    pub c: f64,
    pub beta: f64,
    pub gamma: f64,
    pub z0: ComplexJson,
    pub rho0: f64,
}

/// `seqspec-v1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqSpecJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub functions: Vec<ZeroData>,
    pub k: Vec<f64>,
    #[serde(rename = "R_grid")]
    pub r_grid: Vec<f64>,
    #[serde(default, rename = "R_witness", skip_serializing_if = "Option::is_none")]
    pub r_witness: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesBlock>,
}

impl SeqSpecJson {
    pub fn to_spec(&self) -> Result<SequenceSpec> {
        check_tag(&self.schema, SEQSPEC_V1)?;
        let functions = self
            .functions
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.to_function()
                    .map_err(|e| Error::invalid(format!("field `functions[{i}]`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SequenceSpec::new(functions, self.k.clone(), self.r_grid.clone(), self.r_witness.clone())
    }

    /// The grouped series built from the `series` block's exponents.
    pub fn to_series(&self) -> Result<GroupedSeries> {
        let block = self
            .series
            .as_ref()
            .ok_or_else(|| Error::invalid("field `series`: missing"))?;
        let spec = self.to_spec()?;
        GroupedSeries::new(
            spec.functions().to_vec(),
            block.exponents.clone(),
            spec.r_grid().to_vec(),
        )
    }

    pub fn from_spec(s: &SequenceSpec) -> Self {
        SeqSpecJson {
            schema: Some(SEQSPEC_V1.into()),
            functions: s.functions().iter().map(ZeroData::from_function).collect(),
            k: s.k().to_vec(),
            r_grid: s.r_grid().to_vec(),
            r_witness: s.r_witness().map(<[f64]>::to_vec),
            series: None,
        }
    }
}

/// `cloud-v1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloudJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub label: String,
    pub points: Vec<ComplexJson>,
}

impl CloudJson {
    pub fn to_cloud(&self) -> Result<PointCloud> {
        check_tag(&self.schema, CLOUD_V1)?;
        PointCloud::new(self.points.iter().map(|&p| p.into()).collect(), self.label.clone())
    }

    pub fn from_cloud(c: &PointCloud) -> Self {
        CloudJson {
            schema: Some(CLOUD_V1.into()),
            label: c.label().to_string(),
            points: c.points().iter().map(|&p| p.into()).collect(),
        }
    }
}

/// `kernel-v1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum KernelJson {
    #[serde(rename = "piecewise_const")]
    PiecewiseConst {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schema: Option<String>,
        breaks: Vec<f64>,
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support_hint: Option<[f64; 2]>,
    },
    #[serde(rename = "samples")]
    Samples {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schema: Option<String>,
        t: Vec<f64>,
        phi: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support_hint: Option<[f64; 2]>,
    },
}

impl KernelJson {
    pub fn to_kernel(&self) -> Result<Kernel> {
        let (schema, kernel, hint) = match self {
            KernelJson::PiecewiseConst {
                schema,
                breaks,
                values,
                support_hint,
            } => (
                schema,
                Kernel::piecewise_constant(breaks.clone(), values.clone())?,
                support_hint,
            ),
            KernelJson::Samples {
                schema,
                t,
                phi,
                support_hint,
            } => (schema, Kernel::sampled(t.clone(), phi.clone())?, support_hint),
        };
        check_tag(schema, KERNEL_V1)?;
        match hint {
            Some([lo, hi]) => kernel.with_support_hint(*lo, *hi),
            None => Ok(kernel),
        }
    }

    pub fn from_kernel(k: &Kernel) -> Self {
        let support_hint = k.support_hint().map(|(lo, hi)| [lo, hi]);
        let schema = Some(KERNEL_V1.to_string());
        match k.repr() {
            KernelRepr::PiecewiseConstant { breaks, values } => KernelJson::PiecewiseConst {
                schema,
                breaks: breaks.clone(),
                values: values.clone(),
                support_hint,
            },
            KernelRepr::Sampled { t, phi } => KernelJson::Samples {
                schema,
                t: t.clone(),
                phi: phi.clone(),
                support_hint,
            },
        }
    }
}
