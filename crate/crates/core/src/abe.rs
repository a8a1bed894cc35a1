//! Ciphertext-policy attribute-based key encapsulation.
//!
//! Implements a CP-ABE scheme in the style of Bethencourt, Sahai and Waters
//! ("Ciphertext-Policy Attribute-Based Encryption", IEEE S&P 2007), adapted
//! to the asymmetric (type-3) pairing setting on BLS12-381 and used purely
//! as a KEM: encapsulation under an [`AccessPolicy`] yields a 32-byte
//! [`SessionKey`], and decapsulation with an [`AttributeSecretKey`] recovers
//! the same key exactly when the key's attributes satisfy the policy.
//!
//! With generators `g1`, `g2` and master secrets `alpha`, `beta`:
//!
//! * public params: `h = g1^beta` and `e(g1,g2)^alpha`
//! * attribute key: `d = g2^((alpha+r)/beta)`, per attribute `j`:
//!   `d1_j = g1^r * H(j)^{r_j}`, `d2_j = g2^{r_j}`
//! * encapsulation: secret `s` shared over the policy tree (an `and` gate
//!   splits its share with a Shamir polynomial, an `or` gate copies it);
//!   `c = h^s`, per leaf `y` with share `q_y`: `c1_y = g2^{q_y}`,
//!   `c2_y = H(att(y))^{q_y}`; session key derived from `e(g1,g2)^{alpha*s}`
//! * decapsulation: per satisfied leaf `e(d1_j, c1_y) / e(c2_y, d2_j)
//!   = e(g1,g2)^{r*q_y}`, recombined up the tree by Lagrange interpolation,
//!   and cancelled against `e(c, d)`.
//!
//! All randomized operations draw from a caller-supplied RNG, so seeded
//! runs are reproducible. Group elements serialize in compressed form and
//! round-trip byte-identically.

use std::cell::Cell;
use std::collections::BTreeMap;

use ark_bls12_381::{Bls12_381, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::hashing::curve_maps::wb::WBMap;
use ark_ec::hashing::map_to_curve_hasher::MapToCurveBasedHasher;
use ark_ec::hashing::HashToCurve;
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::field_hashers::DefaultFieldHasher;
use ark_ff::{Field, UniformRand};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::b64;
use crate::policy::{parse_policy, serialize_policy, AccessPolicy, AttributeName, AttributeSet, GateKind, PolicyError};

/// Identifier of the pairing-friendly curve backing the scheme.
pub const CURVE_ID: &str = "bls12-381";

/// The only supported security level, in bits.
pub const SECURITY_LEVEL: u32 = 128;

const KDF_LABEL: &[u8] = b"abe-sd-jwt/v1/kem";
const ATTR_HASH_DST: &[u8] = b"abe-sd-jwt/v1/attr";

const G1_LEN: usize = 48;
const G2_LEN: usize = 96;
const GT_LEN: usize = 576;
const FR_LEN: usize = 32;

type Gt = PairingOutput<Bls12_381>;
type AttrHasher =
    MapToCurveBasedHasher<G1Projective, DefaultFieldHasher<Sha256>, WBMap<ark_bls12_381::g1::Config>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AbeError {
    #[error("unsupported security level {0} (only 128 is available)")]
    UnsupportedSecurityLevel(u32),
    #[error("attribute set must not be empty")]
    EmptyAttributeSet,
    #[error("attribute key does not satisfy the ciphertext policy")]
    PolicyNotSatisfied,
    #[error("malformed ciphertext: {0}")]
    MalformedCiphertext(String),
    #[error("invalid key material: {0}")]
    InvalidKeyMaterial(String),
    #[error("invalid policy: {0}")]
    InvalidPolicy(#[from] PolicyError),
}

thread_local! {
    static PAIRING_OPS: Cell<u64> = const { Cell::new(0) };
}

/// Number of pairings this thread has evaluated so far.
///
/// Diagnostic counter; tests use deltas of it to show that policy-filtered
/// segments are skipped without any pairing work.
pub fn pairing_op_count() -> u64 {
    PAIRING_OPS.with(|c| c.get())
}

fn record_pairings(n: u64) {
    PAIRING_OPS.with(|c| c.set(c.get() + n));
}

fn attr_hasher() -> AttrHasher {
    AttrHasher::new(ATTR_HASH_DST).expect("BLS12-381 G1 hash-to-curve parameters are valid")
}

fn hash_attribute(hasher: &AttrHasher, attr: &AttributeName) -> G1Affine {
    hasher
        .hash(attr.as_str().as_bytes())
        .expect("hash-to-curve is total for byte inputs")
}

fn derive_session_key(k: &Gt) -> SessionKey {
    let mut bytes = Vec::with_capacity(GT_LEN);
    k.serialize_compressed(&mut bytes)
        .expect("serializing a GT element cannot fail");
    let mut h = Sha256::new();
    h.update(KDF_LABEL);
    h.update(&bytes);
    SessionKey(h.finalize().into())
}

fn nonzero_fr<R: RngCore + CryptoRng>(rng: &mut R) -> Fr {
    loop {
        let x = Fr::rand(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// 32-byte symmetric key produced by encapsulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionKey([u8; 32]);

impl SessionKey {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

/// Public parameters of one attribute authority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbeSystemParams {
    h: G1Affine,
    e_gg_alpha: Gt,
}

/// The authority's master secret. Never part of any presentation artifact;
/// it is written only to the authority key file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterSecretKey {
    alpha: Fr,
    beta: Fr,
}

/// A verifier's decryption key for a set of attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSecretKey {
    attrs: AttributeSet,
    d: G2Affine,
    comps: BTreeMap<AttributeName, AttrKeyComponent>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct AttrKeyComponent {
    d1: G1Affine,
    d2: G2Affine,
}

/// Key encapsulation under an access policy. Carries the policy itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbeEncapsulation {
    policy: AccessPolicy,
    policy_text: String,
    c: G1Affine,
    leaves: Vec<LeafCiphertext>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct LeafCiphertext {
    /// `g2^{q_y}` for this leaf's share.
    c1: G2Affine,
    /// `H(att(y))^{q_y}`.
    c2: G1Affine,
}

impl AbeSystemParams {
    pub fn security_level(&self) -> u32 {
        SECURITY_LEVEL
    }

    pub fn curve_id(&self) -> &'static str {
        CURVE_ID
    }
}

impl AttributeSecretKey {
    pub fn attrs(&self) -> &AttributeSet {
        &self.attrs
    }
}

impl AbeEncapsulation {
    pub fn policy(&self) -> &AccessPolicy {
        &self.policy
    }

    /// Canonical serialization of the embedded policy.
    pub fn policy_text(&self) -> &str {
        &self.policy_text
    }
}

/// Creates a fresh authority key pair at the 128-bit level.
///
/// Only `security_level == 128` is accepted. With a seeded RNG the output
/// is reproducible.
pub fn abe_setup<R: RngCore + CryptoRng>(
    security_level: u32,
    rng: &mut R,
) -> Result<(AbeSystemParams, MasterSecretKey), AbeError> {
    if security_level != SECURITY_LEVEL {
        return Err(AbeError::UnsupportedSecurityLevel(security_level));
    }
    let alpha = nonzero_fr(rng);
    let beta = nonzero_fr(rng);
    let h = (G1Projective::generator() * beta).into_affine();
    record_pairings(1);
    let e_gg_alpha = Bls12_381::pairing(G1Affine::generator(), G2Affine::generator()) * alpha;
    Ok((AbeSystemParams { h, e_gg_alpha }, MasterSecretKey { alpha, beta }))
}

/// Issues a decryption key for `attrs`.
///
/// Two keys for the same attribute set are distinct (randomized) but
/// decapsulate exactly the same ciphertexts.
pub fn abe_keygen<R: RngCore + CryptoRng>(
    msk: &MasterSecretKey,
    _params: &AbeSystemParams,
    attrs: &AttributeSet,
    rng: &mut R,
) -> Result<AttributeSecretKey, AbeError> {
    if attrs.is_empty() {
        return Err(AbeError::EmptyAttributeSet);
    }
    let hasher = attr_hasher();
    let r = Fr::rand(rng);
    let beta_inv = msk.beta.inverse().expect("beta is sampled nonzero");
    let d = (G2Projective::generator() * ((msk.alpha + r) * beta_inv)).into_affine();
    let g1_r = G1Projective::generator() * r;
    let mut comps = BTreeMap::new();
    for attr in attrs.iter() {
        let r_j = Fr::rand(rng);
        let d1 = (g1_r + hash_attribute(&hasher, attr) * r_j).into_affine();
        let d2 = (G2Projective::generator() * r_j).into_affine();
        comps.insert(attr.clone(), AttrKeyComponent { d1, d2 });
    }
    Ok(AttributeSecretKey { attrs: attrs.clone(), d, comps })
}

/// Encapsulates a fresh session key under `policy`.
///
/// The policy is canonicalized before sharing, so the embedded policy text
/// re-parses to exactly the tree the shares were assigned over.
pub fn abe_encapsulate<R: RngCore + CryptoRng>(
    params: &AbeSystemParams,
    policy: &AccessPolicy,
    rng: &mut R,
) -> Result<(SessionKey, AbeEncapsulation), AbeError> {
    let policy_text = serialize_policy(policy);
    let policy = parse_policy(&policy_text)?;
    let hasher = attr_hasher();

    let s = Fr::rand(rng);
    let key = derive_session_key(&(params.e_gg_alpha * s));
    let c = (params.h * s).into_affine();

    let mut shares = Vec::with_capacity(policy.leaf_count());
    share_secret(&policy, s, rng, &mut shares);

    let mut c1 = Vec::with_capacity(shares.len());
    let mut c2 = Vec::with_capacity(shares.len());
    let mut leaf_attrs = Vec::with_capacity(shares.len());
    collect_leaf_attrs(&policy, &mut leaf_attrs);
    debug_assert_eq!(leaf_attrs.len(), shares.len());
    for (attr, q) in leaf_attrs.iter().zip(&shares) {
        c1.push(G2Projective::generator() * q);
        c2.push(hash_attribute(&hasher, attr) * q);
    }
    let c1 = G2Projective::normalize_batch(&c1);
    let c2 = G1Projective::normalize_batch(&c2);
    let leaves = c1
        .into_iter()
        .zip(c2)
        .map(|(c1, c2)| LeafCiphertext { c1, c2 })
        .collect();

    Ok((key, AbeEncapsulation { policy, policy_text, c, leaves }))
}

/// Recovers the encapsulated session key, bit-exactly, when
/// `satisfies(ct.policy, sk.attrs)`; fails with [`AbeError::PolicyNotSatisfied`]
/// otherwise, before any pairing is evaluated.
pub fn abe_decapsulate(
    sk: &AttributeSecretKey,
    _params: &AbeSystemParams,
    ct: &AbeEncapsulation,
) -> Result<SessionKey, AbeError> {
    if !ct.policy.satisfies(&sk.attrs) {
        return Err(AbeError::PolicyNotSatisfied);
    }
    let mut cursor = 0usize;
    let a = decrypt_node(&ct.policy, &mut cursor, &ct.leaves, sk)
        .ok_or(AbeError::PolicyNotSatisfied)?;
    record_pairings(1);
    let e_c_d = Bls12_381::pairing(ct.c, sk.d);
    Ok(derive_session_key(&(e_c_d - a)))
}

fn collect_leaf_attrs<'a>(node: &'a AccessPolicy, out: &mut Vec<&'a AttributeName>) {
    match node {
        AccessPolicy::Leaf(a) => out.push(a),
        AccessPolicy::Gate(_, children) => {
            for c in children {
                collect_leaf_attrs(c, out);
            }
        }
    }
}

/// Assigns a share of `secret` to every leaf, in depth-first order.
fn share_secret<R: RngCore + CryptoRng>(
    node: &AccessPolicy,
    secret: Fr,
    rng: &mut R,
    out: &mut Vec<Fr>,
) {
    match node {
        AccessPolicy::Leaf(_) => out.push(secret),
        AccessPolicy::Gate(GateKind::Or, children) => {
            for c in children {
                share_secret(c, secret, rng, out);
            }
        }
        AccessPolicy::Gate(GateKind::And, children) => {
            // k-of-k Shamir split: q(0) = secret, child i receives q(i).
            let mut coeffs = vec![secret];
            for _ in 1..children.len() {
                coeffs.push(Fr::rand(rng));
            }
            for (i, c) in children.iter().enumerate() {
                share_secret(c, poly_eval(&coeffs, (i + 1) as u64), rng, out);
            }
        }
    }
}

fn poly_eval(coeffs: &[Fr], x: u64) -> Fr {
    let x = Fr::from(x);
    let mut acc = Fr::from(0u64);
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Lagrange coefficient at zero for index `i` over the full set `{1..=k}`.
fn lagrange_at_zero(k: usize, i: usize) -> Fr {
    let xi = Fr::from(i as u64);
    let mut acc = Fr::from(1u64);
    for j in 1..=k {
        if j == i {
            continue;
        }
        let xj = Fr::from(j as u64);
        acc *= xj * (xj - xi).inverse().expect("indices are distinct");
    }
    acc
}

/// Returns `e(g1,g2)^{r * q_node(0)}` for a satisfied subtree, walking
/// leaves in the same depth-first order used at encapsulation. Unsatisfied
/// or skipped subtrees advance the cursor without pairing work.
fn decrypt_node(
    node: &AccessPolicy,
    cursor: &mut usize,
    leaves: &[LeafCiphertext],
    sk: &AttributeSecretKey,
) -> Option<Gt> {
    match node {
        AccessPolicy::Leaf(attr) => {
            let leaf = &leaves[*cursor];
            *cursor += 1;
            let comp = sk.comps.get(attr)?;
            record_pairings(2);
            // e(d1, c1) / e(c2, d2)
            Some(Bls12_381::multi_pairing([comp.d1, -leaf.c2], [leaf.c1, comp.d2]))
        }
        AccessPolicy::Gate(GateKind::Or, children) => {
            let mut result = None;
            for c in children {
                if result.is_none() && c.satisfies(&sk.attrs) {
                    result = decrypt_node(c, cursor, leaves, sk);
                } else {
                    *cursor += c.leaf_count();
                }
            }
            result
        }
        AccessPolicy::Gate(GateKind::And, children) => {
            if !children.iter().all(|c| c.satisfies(&sk.attrs)) {
                *cursor += node.leaf_count();
                return None;
            }
            let k = children.len();
            let mut acc = Gt::default();
            for (i, c) in children.iter().enumerate() {
                let f = decrypt_node(c, cursor, leaves, sk)?;
                acc += f * lagrange_at_zero(k, i + 1);
            }
            Some(acc)
        }
    }
}

// --- byte serialization -------------------------------------------------
//
// Fixed-size compressed group elements; variable-length fields carry a
// little-endian u32 length prefix. Round-trips are byte-identical.

struct Reader<'a>(&'a [u8]);

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], String> {
        if self.0.len() < n {
            return Err(format!("truncated input: wanted {n} bytes, have {}", self.0.len()));
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, String> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()))
    }

    fn var_bytes(&mut self) -> Result<&'a [u8], String> {
        let n = self.u32()? as usize;
        self.take(n)
    }

    fn g1(&mut self) -> Result<G1Affine, String> {
        G1Affine::deserialize_compressed(self.take(G1_LEN)?)
            .map_err(|e| format!("invalid G1 element: {e}"))
    }

    fn g2(&mut self) -> Result<G2Affine, String> {
        G2Affine::deserialize_compressed(self.take(G2_LEN)?)
            .map_err(|e| format!("invalid G2 element: {e}"))
    }

    fn gt(&mut self) -> Result<Gt, String> {
        Gt::deserialize_compressed(self.take(GT_LEN)?)
            .map_err(|e| format!("invalid GT element: {e}"))
    }

    fn fr(&mut self) -> Result<Fr, String> {
        Fr::deserialize_compressed(self.take(FR_LEN)?)
            .map_err(|e| format!("invalid scalar: {e}"))
    }

    fn finish(self) -> Result<(), String> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(format!("{} trailing bytes", self.0.len()))
        }
    }
}

fn put_var(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
    out.extend_from_slice(bytes);
}

fn put_elem(out: &mut Vec<u8>, elem: &impl CanonicalSerialize) {
    elem.serialize_compressed(&mut *out)
        .expect("serializing group elements cannot fail");
}

impl AbeSystemParams {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(G1_LEN + GT_LEN);
        put_elem(&mut out, &self.h);
        put_elem(&mut out, &self.e_gg_alpha);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader(bytes);
        let parse = |r: &mut Reader| -> Result<Self, String> {
            let h = r.g1()?;
            let e_gg_alpha = r.gt()?;
            Ok(AbeSystemParams { h, e_gg_alpha })
        };
        let params = parse(&mut r).map_err(AbeError::InvalidKeyMaterial)?;
        r.finish().map_err(AbeError::InvalidKeyMaterial)?;
        Ok(params)
    }
}

impl MasterSecretKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 * FR_LEN);
        put_elem(&mut out, &self.alpha);
        put_elem(&mut out, &self.beta);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader(bytes);
        let parse = |r: &mut Reader| -> Result<Self, String> {
            let alpha = r.fr()?;
            let beta = r.fr()?;
            if beta.is_zero() {
                return Err("beta must be nonzero".into());
            }
            Ok(MasterSecretKey { alpha, beta })
        };
        let msk = parse(&mut r).map_err(AbeError::InvalidKeyMaterial)?;
        r.finish().map_err(AbeError::InvalidKeyMaterial)?;
        Ok(msk)
    }
}

impl AttributeSecretKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        put_elem(&mut out, &self.d);
        out.extend_from_slice(&(self.comps.len() as u32).to_le_bytes());
        for (attr, comp) in &self.comps {
            put_var(&mut out, attr.as_str().as_bytes());
            put_elem(&mut out, &comp.d1);
            put_elem(&mut out, &comp.d2);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader(bytes);
        let parse = |r: &mut Reader| -> Result<Self, String> {
            let d = r.g2()?;
            let n = r.u32()? as usize;
            let mut attrs = AttributeSet::new();
            let mut comps = BTreeMap::new();
            for _ in 0..n {
                let name = std::str::from_utf8(r.var_bytes()?)
                    .map_err(|_| "attribute name is not UTF-8".to_string())?;
                let attr = AttributeName::new(name).map_err(|e| e.to_string())?;
                let d1 = r.g1()?;
                let d2 = r.g2()?;
                attrs.insert(attr.clone());
                comps.insert(attr, AttrKeyComponent { d1, d2 });
            }
            if comps.is_empty() {
                return Err("attribute key has no attributes".into());
            }
            Ok(AttributeSecretKey { attrs, d, comps })
        };
        let sk = parse(&mut r).map_err(AbeError::InvalidKeyMaterial)?;
        r.finish().map_err(AbeError::InvalidKeyMaterial)?;
        Ok(sk)
    }
}

impl AbeEncapsulation {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        put_var(&mut out, self.policy_text.as_bytes());
        put_elem(&mut out, &self.c);
        out.extend_from_slice(&(self.leaves.len() as u32).to_le_bytes());
        for leaf in &self.leaves {
            put_elem(&mut out, &leaf.c1);
            put_elem(&mut out, &leaf.c2);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, AbeError> {
        let mut r = Reader(bytes);
        let parse = |r: &mut Reader| -> Result<Self, String> {
            let policy_text = std::str::from_utf8(r.var_bytes()?)
                .map_err(|_| "policy text is not UTF-8".to_string())?
                .to_string();
            let policy = parse_policy(&policy_text).map_err(|e| e.to_string())?;
            let c = r.g1()?;
            let n = r.u32()? as usize;
            if n != policy.leaf_count() {
                return Err(format!(
                    "leaf count {n} does not match policy ({} leaves)",
                    policy.leaf_count()
                ));
            }
            let mut leaves = Vec::with_capacity(n);
            for _ in 0..n {
                let c1 = r.g2()?;
                let c2 = r.g1()?;
                leaves.push(LeafCiphertext { c1, c2 });
            }
            Ok(AbeEncapsulation { policy, policy_text, c, leaves })
        };
        let ct = parse(&mut r).map_err(AbeError::MalformedCiphertext)?;
        r.finish().map_err(AbeError::MalformedCiphertext)?;
        Ok(ct)
    }
}

// --- key file envelopes --------------------------------------------------

const KTY_PARAMS: &str = "abe-params";
const KTY_MSK: &str = "abe-msk";
const KTY_SK: &str = "abe-sk";

/// JSON envelope for params, master-secret and attribute key files:
/// `{ "kty": ..., "curve": ..., "attrs": [..]?, "data": base64url }`.
#[derive(Debug, Serialize, Deserialize)]
struct KeyEnvelope {
    kty: String,
    curve: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    attrs: Option<Vec<String>>,
    data: String,
}

fn envelope_json(kty: &str, attrs: Option<Vec<String>>, data: &[u8]) -> String {
    let env = KeyEnvelope {
        kty: kty.to_string(),
        curve: CURVE_ID.to_string(),
        attrs,
        data: b64::encode(data),
    };
    serde_json::to_string_pretty(&env).expect("envelope serialization cannot fail")
}

fn open_envelope(json: &str, want_kty: &str) -> Result<(Vec<u8>, Option<Vec<String>>), AbeError> {
    let env: KeyEnvelope = serde_json::from_str(json)
        .map_err(|e| AbeError::InvalidKeyMaterial(format!("invalid envelope JSON: {e}")))?;
    if env.kty != want_kty {
        return Err(AbeError::InvalidKeyMaterial(format!(
            "expected kty `{want_kty}`, found `{}`",
            env.kty
        )));
    }
    if env.curve != CURVE_ID {
        return Err(AbeError::InvalidKeyMaterial(format!("unsupported curve `{}`", env.curve)));
    }
    let data = b64::decode(&env.data)
        .map_err(|e| AbeError::InvalidKeyMaterial(format!("invalid envelope data: {e}")))?;
    Ok((data, env.attrs))
}

impl AbeSystemParams {
    pub fn to_json(&self) -> String {
        envelope_json(KTY_PARAMS, None, &self.to_bytes())
    }

    pub fn from_json(json: &str) -> Result<Self, AbeError> {
        let (data, _) = open_envelope(json, KTY_PARAMS)?;
        Self::from_bytes(&data)
    }
}

impl MasterSecretKey {
    pub fn to_json(&self) -> String {
        envelope_json(KTY_MSK, None, &self.to_bytes())
    }

    pub fn from_json(json: &str) -> Result<Self, AbeError> {
        let (data, _) = open_envelope(json, KTY_MSK)?;
        Self::from_bytes(&data)
    }
}

impl AttributeSecretKey {
    pub fn to_json(&self) -> String {
        let attrs = self.attrs.iter().map(|a| a.as_str().to_string()).collect();
        envelope_json(KTY_SK, Some(attrs), &self.to_bytes())
    }

    pub fn from_json(json: &str) -> Result<Self, AbeError> {
        let (data, attrs) = open_envelope(json, KTY_SK)?;
        let sk = Self::from_bytes(&data)?;
        if let Some(listed) = attrs {
            let listed = AttributeSet::from_names(listed.iter())
                .map_err(|e| AbeError::InvalidKeyMaterial(e.to_string()))?;
            if listed != sk.attrs {
                return Err(AbeError::InvalidKeyMaterial(
                    "envelope attrs do not match key material".into(),
                ));
            }
        }
        Ok(sk)
    }
}
