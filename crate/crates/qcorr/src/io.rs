//! Versioned JSON file schemas and conversions to the domain types.
//!
//! Complex numbers are `[re, im]` pairs throughout; matrices are row-major
//! (A-major composite indexing). Every schema carries a `"schema": "v1"`
//! field. Output files are written atomically (temp file then rename) and
//! field order is fixed, so identical inputs reproduce identical bytes.

use crate::error::{Error, Result};
use crate::measurements::{Measurement, Povm, VonNeumannMeasurement};
use crate::measures::{Certificate, MeasureResult, MeasurementKind, SeparableAnsatz};
use crate::qcore::channel::QuantumChannel;
use crate::qcore::linalg::{cplx, CMatrix, CVector};
use crate::qcore::state::{BipartiteState, DensityMatrix, PureState};
use crate::reductions::{
    DiscordInstance, EofInstance, HolevoInstance, KInstance, SeparabilityInstance,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

pub const SCHEMA_VERSION: &str = "v1";

pub type CNum = [f64; 2];
pub type MatrixData = Vec<Vec<CNum>>;

fn default_schema() -> String {
    SCHEMA_VERSION.to_string()
}

fn check_schema(schema: &str) -> Result<()> {
    if schema != SCHEMA_VERSION {
        return Err(Error::InvalidArgument(format!(
            "unsupported schema {schema:?}, expected {SCHEMA_VERSION:?}"
        )));
    }
    Ok(())
}

pub fn matrix_to_data(m: &CMatrix) -> MatrixData {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn data_to_matrix(data: &MatrixData) -> Result<CMatrix> {
    let rows = data.len();
    if rows == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let cols = data[0].len();
    if data.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidArgument("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| cplx(data[i][j][0], data[i][j][1])))
}

pub fn vector_to_data(v: &CVector) -> Vec<CNum> {
    (0..v.len()).map(|i| [v[i].re, v[i].im]).collect()
}

pub fn data_to_vector(data: &[CNum]) -> CVector {
    CVector::from_fn(data.len(), |i, _| cplx(data[i][0], data[i][1]))
}

/// Density matrix with subsystem dims: `{"dims":[m,n],"matrix":[[[re,im],..],..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub dims: Vec<usize>,
    pub matrix: MatrixData,
}

impl StateFile {
    pub fn from_bipartite(state: &BipartiteState) -> Self {
        Self {
            schema: default_schema(),
            dims: vec![state.dim_a(), state.dim_b()],
            matrix: matrix_to_data(state.matrix()),
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        Self {
            schema: default_schema(),
            dims: vec![rho.dim()],
            matrix: matrix_to_data(rho.matrix()),
        }
    }

    pub fn to_bipartite(&self) -> Result<BipartiteState> {
        check_schema(&self.schema)?;
        if self.dims.len() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "need dims [m, n] for a bipartite state, got {:?}",
                self.dims
            )));
        }
        BipartiteState::from_matrix(data_to_matrix(&self.matrix)?, self.dims[0], self.dims[1])
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        check_schema(&self.schema)?;
        let total: usize = self.dims.iter().product();
        let mat = data_to_matrix(&self.matrix)?;
        if mat.nrows() != total {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} do not match matrix size {}",
                self.dims,
                mat.nrows()
            )));
        }
        DensityMatrix::new(mat)
    }

    /// Hermitian operator (no trace/PSD requirements), for linear optimization.
    pub fn to_operator(&self) -> Result<(CMatrix, usize, usize)> {
        check_schema(&self.schema)?;
        if self.dims.len() != 2 {
            return Err(Error::DimensionMismatch("need dims [m, n]".into()));
        }
        let mat = data_to_matrix(&self.matrix)?;
        if mat.nrows() != self.dims[0] * self.dims[1] || mat.ncols() != mat.nrows() {
            return Err(Error::DimensionMismatch("operator shape mismatch".into()));
        }
        if crate::qcore::linalg::max_abs_diff(&mat, &mat.adjoint()) > 1e-8 {
            return Err(Error::InvalidArgument("operator must be Hermitian".into()));
        }
        Ok((mat, self.dims[0], self.dims[1]))
    }
}

/// `{"dims":[..],"vector":[[re,im],..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PureStateFile {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub dims: Vec<usize>,
    pub vector: Vec<CNum>,
}

impl PureStateFile {
    pub fn new(dims: Vec<usize>, state: &PureState) -> Self {
        Self {
            schema: default_schema(),
            dims,
            vector: vector_to_data(state.amplitudes()),
        }
    }

    pub fn to_pure(&self) -> Result<PureState> {
        check_schema(&self.schema)?;
        let total: usize = self.dims.iter().product();
        if total != self.vector.len() {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} do not match vector length {}",
                self.dims,
                self.vector.len()
            )));
        }
        PureState::new(data_to_vector(&self.vector))
    }
}

/// `{"dim_in":..,"dim_out":..,"kraus":[matrix,..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelFile {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixData>,
}

impl ChannelFile {
    pub fn from_channel(ch: &QuantumChannel) -> Self {
        Self {
            schema: default_schema(),
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch.kraus().iter().map(matrix_to_data).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        check_schema(&self.schema)?;
        let kraus = self
            .kraus
            .iter()
            .map(data_to_matrix)
            .collect::<Result<Vec<_>>>()?;
        QuantumChannel::new(self.dim_in, self.dim_out, kraus)
    }
}

/// `{"dim":n,"type":"vn"|"povm","elements":[matrix,..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementFile {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub dim: usize,
    #[serde(rename = "type")]
    pub kind: String,
    pub elements: Vec<MatrixData>,
}

impl MeasurementFile {
    pub fn from_measurement(meas: &Measurement) -> Self {
        Self {
            schema: default_schema(),
            dim: meas.dim(),
            kind: meas.kind_name().to_string(),
            elements: meas.elements().iter().map(matrix_to_data).collect(),
        }
    }

    pub fn to_measurement(&self) -> Result<Measurement> {
        check_schema(&self.schema)?;
        let elements = self
            .elements
            .iter()
            .map(data_to_matrix)
            .collect::<Result<Vec<_>>>()?;
        match self.kind.as_str() {
            "vn" => Ok(Measurement::VonNeumann(VonNeumannMeasurement::new(
                self.dim, elements,
            )?)),
            "povm" => Ok(Measurement::Povm(Povm::new(self.dim, elements)?)),
            other => Err(Error::InvalidMeasurement(format!(
                "unknown measurement type {other:?}"
            ))),
        }
    }
}

/// Promise-problem instances, tagged by `kind`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceFile {
    Separability {
        #[serde(default = "default_schema")]
        schema: String,
        state: StateFile,
        delta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        provenance: Option<String>,
    },
    Eof {
        #[serde(default = "default_schema")]
        schema: String,
        state: StateFile,
        threshold: f64,
        gap: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        provenance: Option<String>,
    },
    Discord {
        #[serde(default = "default_schema")]
        schema: String,
        state: StateFile,
        threshold: f64,
        gap: f64,
        measurement_kind: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        provenance: Option<String>,
    },
    Holevo {
        #[serde(default = "default_schema")]
        schema: String,
        channel: ChannelFile,
        input_state: StateFile,
        threshold: f64,
        gap: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        provenance: Option<String>,
    },
    KSet {
        #[serde(default = "default_schema")]
        schema: String,
        base_state: StateFile,
        ext_dims: [usize; 2],
        delta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        provenance: Option<String>,
    },
}

impl InstanceFile {
    pub fn from_separability(inst: &SeparabilityInstance, provenance: Option<String>) -> Self {
        InstanceFile::Separability {
            schema: default_schema(),
            state: StateFile::from_bipartite(&inst.state),
            delta: inst.delta,
            provenance,
        }
    }

    pub fn from_eof(inst: &EofInstance, provenance: Option<String>) -> Self {
        InstanceFile::Eof {
            schema: default_schema(),
            state: StateFile::from_bipartite(&inst.state),
            threshold: inst.threshold,
            gap: inst.gap,
            provenance,
        }
    }

    pub fn from_discord(inst: &DiscordInstance, provenance: Option<String>) -> Self {
        InstanceFile::Discord {
            schema: default_schema(),
            state: StateFile::from_bipartite(&inst.state),
            threshold: inst.threshold,
            gap: inst.gap,
            measurement_kind: inst.kind.as_str().to_string(),
            provenance,
        }
    }

    pub fn from_holevo(inst: &HolevoInstance, provenance: Option<String>) -> Self {
        InstanceFile::Holevo {
            schema: default_schema(),
            channel: ChannelFile::from_channel(&inst.channel),
            input_state: StateFile::from_density(&inst.input),
            threshold: inst.threshold,
            gap: inst.gap,
            provenance,
        }
    }

    pub fn from_k(inst: &KInstance, provenance: Option<String>) -> Self {
        InstanceFile::KSet {
            schema: default_schema(),
            base_state: StateFile::from_bipartite(&inst.base),
            ext_dims: [inst.ext_dims.0, inst.ext_dims.1],
            delta: inst.delta,
            provenance,
        }
    }

    pub fn to_separability(&self) -> Result<SeparabilityInstance> {
        match self {
            InstanceFile::Separability { schema, state, delta, .. } => {
                check_schema(schema)?;
                SeparabilityInstance::new(state.to_bipartite()?, *delta)
            }
            _ => Err(Error::InvalidArgument(
                "expected a separability instance".into(),
            )),
        }
    }

    pub fn to_eof(&self) -> Result<EofInstance> {
        match self {
            InstanceFile::Eof { schema, state, threshold, gap, .. } => {
                check_schema(schema)?;
                if !(*gap > 0.0) {
                    return Err(Error::InvalidArgument("gap must be > 0".into()));
                }
                Ok(EofInstance {
                    state: state.to_bipartite()?,
                    threshold: *threshold,
                    gap: *gap,
                })
            }
            _ => Err(Error::InvalidArgument("expected an eof instance".into())),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            InstanceFile::Separability { .. } => "separability",
            InstanceFile::Eof { .. } => "eof",
            InstanceFile::Discord { .. } => "discord",
            InstanceFile::Holevo { .. } => "holevo",
            InstanceFile::KSet { .. } => "k-set",
        }
    }
}

pub fn measurement_kind_from_str(s: &str) -> Result<MeasurementKind> {
    match s {
        "vn" => Ok(MeasurementKind::VonNeumann),
        "povm" => Ok(MeasurementKind::Povm),
        other => Err(Error::InvalidArgument(format!(
            "unknown measurement kind {other:?} (expected vn or povm)"
        ))),
    }
}

/// Certificate payloads, tagged by `type`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CertificateFile {
    Measurement { measurement: MeasurementFile },
    Ensemble { weights: Vec<f64>, vectors: Vec<Vec<CNum>> },
    SeparableAnsatz {
        dims: [usize; 2],
        terms: Vec<AnsatzTermFile>,
    },
    Extension { dims: [usize; 3], matrix: MatrixData },
    ProductPair { a: Vec<CNum>, b: Vec<CNum> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnsatzTermFile {
    pub weight: f64,
    pub a: Vec<CNum>,
    pub b: Vec<CNum>,
}

impl CertificateFile {
    pub fn from_certificate(cert: &Certificate) -> Self {
        match cert {
            Certificate::Measurement(m) => CertificateFile::Measurement {
                measurement: MeasurementFile::from_measurement(m),
            },
            Certificate::Ensemble(members) => CertificateFile::Ensemble {
                weights: members.iter().map(|(p, _)| *p).collect(),
                vectors: members
                    .iter()
                    .map(|(_, v)| vector_to_data(v.amplitudes()))
                    .collect(),
            },
            Certificate::SeparableAnsatz(ansatz) => CertificateFile::SeparableAnsatz {
                dims: [ansatz.dims().0, ansatz.dims().1],
                terms: ansatz
                    .terms()
                    .iter()
                    .map(|(q, a, b)| AnsatzTermFile {
                        weight: *q,
                        a: vector_to_data(a),
                        b: vector_to_data(b),
                    })
                    .collect(),
            },
            Certificate::Extension { dims, state } => CertificateFile::Extension {
                dims: [dims.0, dims.1, dims.2],
                matrix: matrix_to_data(state.matrix()),
            },
            Certificate::ProductPair { a, b } => CertificateFile::ProductPair {
                a: vector_to_data(a),
                b: vector_to_data(b),
            },
        }
    }
}

/// Reads back a separable-ansatz certificate (used by downstream checks).
pub fn ansatz_from_file(dims: [usize; 2], terms: &[AnsatzTermFile]) -> Result<SeparableAnsatz> {
    let terms = terms
        .iter()
        .map(|t| (t.weight, data_to_vector(&t.a), data_to_vector(&t.b)))
        .collect();
    SeparableAnsatz::new(dims[0], dims[1], terms)
}

/// Full result artifact for `compute`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureResultFile {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub measure: String,
    pub value: f64,
    pub bound_direction: String,
    pub optimizer: crate::measures::OptSummary,
    pub config: RunConfigFile,
    pub input_digest: String,
    pub certificate: CertificateFile,
}

impl MeasureResultFile {
    pub fn new(
        measure: &str,
        result: &MeasureResult,
        config: RunConfigFile,
        input_digest: String,
    ) -> Self {
        Self {
            schema: default_schema(),
            measure: measure.to_string(),
            value: result.value,
            bound_direction: result.bound_direction.as_str().to_string(),
            optimizer: result.optimizer.clone(),
            config,
            input_digest,
            certificate: CertificateFile::from_certificate(&result.certificate),
        }
    }
}

/// Reproducibility block embedded in every output artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfigFile {
    pub seed: u64,
    pub starts: usize,
    pub max_iters: usize,
    pub tol_f: f64,
    pub format: String,
}

/// SHA-256 of raw bytes, hex encoded with an algorithm prefix.
pub fn digest_bytes(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    let mut hex = String::with_capacity(7 + 64);
    hex.push_str("sha256:");
    for byte in out {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Serializes pretty JSON and writes atomically (temp file, then rename).
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_bytes_atomic(path, &bytes)
}

pub fn write_bytes_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let bytes = std::fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random::{master_rng, random_bipartite_with};
    use crate::qcore::state::bell_state;

    #[test]
    fn state_file_round_trip() {
        let mut rng = master_rng(3);
        let st = random_bipartite_with(2, 3, 4, &mut rng).unwrap();
        let file = StateFile::from_bipartite(&st);
        let json = serde_json::to_string(&file).unwrap();
        let back: StateFile = serde_json::from_str(&json).unwrap();
        let st2 = back.to_bipartite().unwrap();
        assert!(crate::qcore::linalg::max_abs_diff(st.matrix(), st2.matrix()) < 1e-15);
    }

    #[test]
    fn invalid_state_file_names_the_invariant() {
        let mut file = StateFile::from_bipartite(&bell_state());
        file.matrix[0][0] = [2.0, 0.0];
        let err = file.to_bipartite().unwrap_err();
        assert!(err.to_string().contains("trace") || err.to_string().contains("PSD"));
    }

    #[test]
    fn unsupported_schema_rejected() {
        let mut file = StateFile::from_bipartite(&bell_state());
        file.schema = "v0".into();
        assert!(file.to_bipartite().is_err());
    }

    #[test]
    fn channel_file_round_trip() {
        let ch = QuantumChannel::dephasing_qubit();
        let file = ChannelFile::from_channel(&ch);
        let back = file.to_channel().unwrap();
        assert_eq!(back.dim_in(), 2);
        assert_eq!(back.kraus().len(), 2);
    }

    #[test]
    fn digest_is_stable() {
        let d = digest_bytes(b"abc");
        assert_eq!(
            d,
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn atomic_write_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out/state.json");
        let file = StateFile::from_bipartite(&bell_state());
        write_json_atomic(&path, &file).unwrap();
        let back: StateFile = read_json(&path).unwrap();
        assert_eq!(back.dims, vec![2, 2]);
        // identical content on rewrite
        let first = std::fs::read(&path).unwrap();
        write_json_atomic(&path, &file).unwrap();
        assert_eq!(first, std::fs::read(&path).unwrap());
    }

    #[test]
    fn instance_file_round_trip() {
        let inst = SeparabilityInstance::new(bell_state(), 0.25).unwrap();
        let file = InstanceFile::from_separability(&inst, Some("sha256:test".into()));
        let json = serde_json::to_string_pretty(&file).unwrap();
        assert!(json.contains("\"kind\": \"separability\""));
        let back: InstanceFile = serde_json::from_str(&json).unwrap();
        let inst2 = back.to_separability().unwrap();
        assert_eq!(inst2.delta, 0.25);
        assert!(back.to_eof().is_err());
    }
}
