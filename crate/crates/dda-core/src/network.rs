//! Trainable projection networks with manual backpropagation.
//!
//! Two architectures share one flat parameter store and gradient contract:
//!
//! - `Mlp`: fully connected layers with ReLU hidden activations, applied
//!   row-wise to feature vectors;
//! - `ConvEncDec`: a small encoder-decoder over images, 3x3 convolutions
//!   with ReLU, 2x2 max-pooling between encoder levels, nearest-neighbor
//!   upsampling with skip concatenation on the way back, and a final 1x1
//!   convolution producing one output per pixel.
//!
//! Both end in a structural sigmoid: the projection is bounded to (0, 1)
//! for any finite input. `backward` consumes the loss gradient w.r.t. the
//! raw pre-sigmoid outputs, as produced by the `losses` module.
//!
//! Gradient accumulation always iterates elements in a fixed order so a
//! given seed reproduces training bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DdaError, Result};
use crate::losses::sigmoid;
use crate::rng::rng_from;

use crate::matrix::Matrix;

const CHECKPOINT_MAGIC: &[u8; 4] = b"DDA1";
const CHECKPOINT_VERSION: u32 = 1;

/// Architecture descriptor. The sigmoid output is structural, not listed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Arch {
    /// Layer sizes from input dimension to the single output, e.g.
    /// `[2, 16, 16, 1]`.
    Mlp { layers: Vec<usize> },
    /// Encoder-decoder over `in_channels` image planes; level l uses
    /// `base_channels << l` channels.
    ConvEncDec {
        in_channels: usize,
        base_channels: usize,
        levels: usize,
    },
}

impl Arch {
    pub fn validate(&self) -> Result<()> {
        match self {
            Arch::Mlp { layers } => {
                if layers.len() < 2 {
                    return Err(DdaError::InvalidInput(
                        "mlp needs at least input and output sizes".into(),
                    ));
                }
                if *layers.last().unwrap() != 1 {
                    return Err(DdaError::InvalidInput(
                        "projection output size must be 1".into(),
                    ));
                }
                if layers.iter().any(|&s| s == 0) {
                    return Err(DdaError::InvalidInput("zero-sized layer".into()));
                }
            }
            Arch::ConvEncDec {
                in_channels,
                base_channels,
                levels,
            } => {
                if *in_channels == 0 || *base_channels == 0 || *levels == 0 {
                    return Err(DdaError::InvalidInput(
                        "conv architecture sizes must be positive".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Total number of parameters.
    pub fn param_count(&self) -> usize {
        match self {
            Arch::Mlp { layers } => layers
                .windows(2)
                .map(|w| w[0] * w[1] + w[1])
                .sum(),
            Arch::ConvEncDec {
                in_channels,
                base_channels,
                levels,
            } => {
                let ch = |l: usize| base_channels << l;
                let mut total = 0;
                let mut prev = *in_channels;
                for l in 0..*levels {
                    total += ch(l) * prev * 9 + ch(l);
                    prev = ch(l);
                }
                for l in (0..levels.saturating_sub(1)).rev() {
                    let in_ch = ch(l) + prev;
                    total += ch(l) * in_ch * 9 + ch(l);
                    prev = ch(l);
                }
                total += prev + 1; // 1x1 output conv
                total
            }
        }
    }

    /// Input feature dimension for MLPs.
    pub fn input_dim(&self) -> Option<usize> {
        match self {
            Arch::Mlp { layers } => Some(layers[0]),
            Arch::ConvEncDec { .. } => None,
        }
    }

    /// Parse the textual form: `mlp:2,16,16,1` or `conv:3,8,2`
    /// (in_channels, base_channels, levels).
    pub fn parse_str(s: &str) -> Result<Arch> {
        let bad = |msg: &str| DdaError::InvalidInput(format!("architecture '{s}': {msg}"));
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected kind:sizes"))?;
        let sizes: Vec<usize> = rest
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| bad(&e.to_string()))?;
        let arch = match kind {
            "mlp" => Arch::Mlp { layers: sizes },
            "conv" => {
                if sizes.len() != 3 {
                    return Err(bad("conv needs in_channels,base_channels,levels"));
                }
                Arch::ConvEncDec {
                    in_channels: sizes[0],
                    base_channels: sizes[1],
                    levels: sizes[2],
                }
            }
            _ => return Err(bad("unknown kind (mlp|conv)")),
        };
        arch.validate()?;
        Ok(arch)
    }
}

impl std::fmt::Display for Arch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Arch::Mlp { layers } => {
                write!(f, "mlp:")?;
                for (i, s) in layers.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                Ok(())
            }
            Arch::ConvEncDec {
                in_channels,
                base_channels,
                levels,
            } => write!(f, "conv:{in_channels},{base_channels},{levels}"),
        }
    }
}

/// Architecture plus flat parameter store.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub arch: Arch,
    pub params: Vec<f64>,
}

/// He-uniform for layers feeding ReLU, Xavier-uniform for the output layer,
/// zero biases.
pub fn init_params(arch: &Arch, seed: u64) -> Result<ModelParams> {
    arch.validate()?;
    let mut rng = rng_from(seed);
    let mut params = vec![0.0; arch.param_count()];
    match arch {
        Arch::Mlp { layers } => {
            let n_layers = layers.len() - 1;
            let mut off = 0;
            for l in 0..n_layers {
                let (fan_in, fan_out) = (layers[l], layers[l + 1]);
                let limit = if l + 1 == n_layers {
                    (6.0 / (fan_in + fan_out) as f64).sqrt()
                } else {
                    (6.0 / fan_in as f64).sqrt()
                };
                for p in params[off..off + fan_in * fan_out].iter_mut() {
                    *p = rng.gen_range(-limit..limit);
                }
                off += fan_in * fan_out + fan_out; // biases stay zero
            }
        }
        Arch::ConvEncDec { .. } => {
            let convs = conv_layout(arch);
            for c in &convs {
                let limit = if c.kernel == 1 {
                    (6.0 / (c.in_ch + c.out_ch) as f64).sqrt()
                } else {
                    (6.0 / (c.in_ch * c.kernel * c.kernel) as f64).sqrt()
                };
                let w_len = c.out_ch * c.in_ch * c.kernel * c.kernel;
                for p in params[c.offset..c.offset + w_len].iter_mut() {
                    *p = rng.gen_range(-limit..limit);
                }
            }
        }
    }
    Ok(ModelParams { arch: arch.clone(), params })
}

/// Raw and sigmoid outputs of a forward pass plus everything backward needs.
pub struct ForwardPass {
    /// σ(y), strictly inside (0, 1).
    pub sigma: Vec<f64>,
    /// Pre-sigmoid outputs y.
    pub raw: Vec<f64>,
    pub cache: Cache,
}

pub enum Cache {
    Mlp {
        /// Activations entering each layer; `acts[0]` is the input batch.
        acts: Vec<Matrix>,
    },
    Conv(Box<ConvCache>),
}

pub struct ConvCache {
    h: usize,
    w: usize,
    input: Vec<f64>,
    /// Post-ReLU encoder activations per level, at that level's resolution.
    enc_acts: Vec<Vec<f64>>,
    /// Pooled tensors feeding encoder levels 1..; `pooled_inputs[i]` enters
    /// level i + 1.
    pooled_inputs: Vec<Vec<f64>>,
    /// Argmax indices for each pooling stage.
    pool_argmax: Vec<Vec<usize>>,
    /// Post-ReLU decoder activations (and their concatenated inputs).
    dec_inputs: Vec<Vec<f64>>,
    dec_acts: Vec<Vec<f64>>,
}

impl ModelParams {
    /// Forward over feature rows (MLP architectures).
    pub fn forward(&self, x: &Matrix) -> Result<ForwardPass> {
        let Arch::Mlp { layers } = &self.arch else {
            return Err(DdaError::InvalidInput(
                "matrix forward requires an mlp architecture".into(),
            ));
        };
        if x.cols != layers[0] {
            return Err(DdaError::DimensionMismatch {
                expected: layers[0],
                got: x.cols,
            });
        }
        if x.data.iter().any(|v| !v.is_finite()) {
            return Err(DdaError::InvalidInput("non-finite input".into()));
        }

        let n_layers = layers.len() - 1;
        let mut acts = Vec::with_capacity(n_layers);
        let mut cur = x.clone();
        let mut off = 0;
        let mut raw = Vec::new();
        for l in 0..n_layers {
            let (d_in, d_out) = (layers[l], layers[l + 1]);
            let w = &self.params[off..off + d_in * d_out];
            let b = &self.params[off + d_in * d_out..off + d_in * d_out + d_out];
            off += d_in * d_out + d_out;

            let mut out = Matrix::zeros(cur.rows, d_out);
            for r in 0..cur.rows {
                let xr = cur.row(r);
                for o in 0..d_out {
                    let wrow = &w[o * d_in..(o + 1) * d_in];
                    let mut z = b[o];
                    for (wi, xi) in wrow.iter().zip(xr) {
                        z += wi * xi;
                    }
                    if l + 1 < n_layers {
                        z = z.max(0.0); // ReLU on hidden layers
                    }
                    out.data[r * d_out + o] = z;
                }
            }
            acts.push(std::mem::replace(&mut cur, out));
            if l + 1 == n_layers {
                raw = cur.data.clone();
            }
        }
        let sigma: Vec<f64> = raw.iter().map(|&y| sigmoid(y)).collect();
        Ok(ForwardPass {
            sigma,
            raw,
            cache: Cache::Mlp { acts },
        })
    }

    /// Backpropagate `grad_y` (∂loss/∂ pre-sigmoid output, one per batch
    /// element) into a flat parameter-gradient store.
    pub fn backward(&self, cache: &Cache, grad_y: &[f64]) -> Result<Vec<f64>> {
        match (&self.arch, cache) {
            (Arch::Mlp { layers }, Cache::Mlp { acts }) => {
                self.backward_mlp(layers, acts, grad_y)
            }
            (Arch::ConvEncDec { .. }, Cache::Conv(c)) => self.backward_conv(c, grad_y),
            _ => Err(DdaError::InvalidInput("cache does not match architecture".into())),
        }
    }

    fn backward_mlp(
        &self,
        layers: &[usize],
        acts: &[Matrix],
        grad_y: &[f64],
    ) -> Result<Vec<f64>> {
        let n_layers = layers.len() - 1;
        let rows = acts[0].rows;
        if grad_y.len() != rows {
            return Err(DdaError::DimensionMismatch {
                expected: rows,
                got: grad_y.len(),
            });
        }
        let mut grads = vec![0.0; self.params.len()];
        // layer parameter offsets
        let mut offsets = Vec::with_capacity(n_layers);
        let mut off = 0;
        for l in 0..n_layers {
            offsets.push(off);
            off += layers[l] * layers[l + 1] + layers[l + 1];
        }

        let mut delta = Matrix::new(rows, 1, grad_y.to_vec());
        for l in (0..n_layers).rev() {
            let (d_in, d_out) = (layers[l], layers[l + 1]);
            let w_off = offsets[l];
            let b_off = w_off + d_in * d_out;
            let input = &acts[l];

            for r in 0..rows {
                let dr = delta.row(r);
                let xr = input.row(r);
                for o in 0..d_out {
                    let d = dr[o];
                    if d != 0.0 {
                        let wg = &mut grads[w_off + o * d_in..w_off + (o + 1) * d_in];
                        for (g, xi) in wg.iter_mut().zip(xr) {
                            *g += d * xi;
                        }
                        grads[b_off + o] += d;
                    }
                }
            }

            if l > 0 {
                let w = &self.params[w_off..w_off + d_in * d_out];
                let mut prev = Matrix::zeros(rows, d_in);
                for r in 0..rows {
                    let dr = delta.row(r);
                    let ar = input.row(r);
                    let pr = &mut prev.data[r * d_in..(r + 1) * d_in];
                    for o in 0..d_out {
                        let d = dr[o];
                        if d != 0.0 {
                            let wrow = &w[o * d_in..(o + 1) * d_in];
                            for i in 0..d_in {
                                pr[i] += d * wrow[i];
                            }
                        }
                    }
                    // ReLU derivative via the cached post-activation values
                    for i in 0..d_in {
                        if ar[i] <= 0.0 {
                            pr[i] = 0.0;
                        }
                    }
                }
                delta = prev;
            }
        }
        Ok(grads)
    }

    /// Forward over one image stored channel-major (c, y, x).
    pub fn forward_image(&self, img: &[f64], h: usize, w: usize) -> Result<ForwardPass> {
        let Arch::ConvEncDec {
            in_channels,
            levels,
            ..
        } = &self.arch
        else {
            return Err(DdaError::InvalidInput(
                "image forward requires a conv architecture".into(),
            ));
        };
        if img.len() != in_channels * h * w {
            return Err(DdaError::DimensionMismatch {
                expected: in_channels * h * w,
                got: img.len(),
            });
        }
        if img.iter().any(|v| !v.is_finite()) {
            return Err(DdaError::InvalidInput("non-finite input".into()));
        }
        let down = 1usize << (levels - 1);
        if h % down != 0 || w % down != 0 {
            return Err(DdaError::InvalidInput(format!(
                "image {h}x{w} not divisible by {down} for {levels} levels"
            )));
        }

        let convs = conv_layout(&self.arch);
        let levels = *levels;
        let mut enc_acts = Vec::with_capacity(levels);
        let mut pooled_inputs = Vec::new();
        let mut pool_argmax = Vec::new();
        let (mut ch, mut hh, mut ww) = (*in_channels, h, w);
        let mut cur = img.to_vec();
        for l in 0..levels {
            let c = &convs[l];
            cur = conv3_relu_forward(&self.params, c, &cur, ch, hh, ww);
            ch = c.out_ch;
            enc_acts.push(cur.clone());
            if l + 1 < levels {
                let (pooled, argmax) = maxpool2_forward(&cur, ch, hh, ww);
                pool_argmax.push(argmax);
                pooled_inputs.push(pooled.clone());
                cur = pooled;
                hh /= 2;
                ww /= 2;
            }
        }

        let mut dec_inputs = Vec::new();
        let mut dec_acts = Vec::new();
        for (i, l) in (0..levels - 1).rev().enumerate() {
            let c = &convs[levels + i];
            let up = upsample2_forward(&cur, ch, hh, ww);
            hh *= 2;
            ww *= 2;
            let skip = &enc_acts[l];
            let skip_ch = convs[l].out_ch;
            let mut cat = Vec::with_capacity((skip_ch + ch) * hh * ww);
            cat.extend_from_slice(skip);
            cat.extend_from_slice(&up);
            dec_inputs.push(cat.clone());
            cur = conv3_relu_forward(&self.params, c, &cat, skip_ch + ch, hh, ww);
            ch = c.out_ch;
            dec_acts.push(cur.clone());
        }

        // final 1x1 convolution to one channel, no activation
        let out_conv = convs.last().unwrap();
        let wgt = &self.params[out_conv.offset..out_conv.offset + ch];
        let bias = self.params[out_conv.offset + ch];
        let mut raw = vec![0.0; hh * ww];
        for p in 0..hh * ww {
            let mut z = bias;
            for c in 0..ch {
                z += wgt[c] * cur[c * hh * ww + p];
            }
            raw[p] = z;
        }
        let sigma = raw.iter().map(|&y| sigmoid(y)).collect();
        Ok(ForwardPass {
            sigma,
            raw,
            cache: Cache::Conv(Box::new(ConvCache {
                h,
                w,
                input: img.to_vec(),
                enc_acts,
                pooled_inputs,
                pool_argmax,
                dec_inputs,
                dec_acts,
            })),
        })
    }

    fn backward_conv(&self, cache: &ConvCache, grad_y: &[f64]) -> Result<Vec<f64>> {
        let Arch::ConvEncDec { levels, .. } = &self.arch else {
            unreachable!("checked by backward()");
        };
        let (h, w) = (cache.h, cache.w);
        if grad_y.len() != h * w {
            return Err(DdaError::DimensionMismatch {
                expected: h * w,
                got: grad_y.len(),
            });
        }
        let convs = conv_layout(&self.arch);
        let levels = *levels;
        let mut grads = vec![0.0; self.params.len()];

        // output 1x1 conv
        let out_conv = convs.last().unwrap();
        let ch_out_in = out_conv.in_ch;
        let last_act: &[f64] = if levels > 1 {
            cache.dec_acts.last().expect("decoder output cached")
        } else {
            &cache.enc_acts[0]
        };
        let wgt = &self.params[out_conv.offset..out_conv.offset + ch_out_in];
        let mut d_cur = vec![0.0; ch_out_in * h * w];
        for p in 0..h * w {
            let g = grad_y[p];
            if g != 0.0 {
                for c in 0..ch_out_in {
                    grads[out_conv.offset + c] += g * last_act[c * h * w + p];
                    d_cur[c * h * w + p] += g * wgt[c];
                }
                grads[out_conv.offset + ch_out_in] += g;
            }
        }

        // decoder stack, reverse of construction
        let (mut hh, mut ww) = (h, w);
        let mut enc_grads: Vec<Option<Vec<f64>>> = vec![None; levels];
        for (i, l) in (0..levels - 1).rev().enumerate().rev() {
            let c = &convs[levels + i];
            let act = &cache.dec_acts[i];
            let input = &cache.dec_inputs[i];
            let d_in =
                conv3_relu_backward(&self.params, &mut grads, c, input, act, &d_cur, hh, ww);
            let skip_ch = convs[l].out_ch;
            let split = skip_ch * hh * ww;
            enc_grads[l] = Some(d_in[..split].to_vec());
            let d_up = &d_in[split..];
            d_cur = upsample2_backward(d_up, c.in_ch - skip_ch, hh / 2, ww / 2);
            hh /= 2;
            ww /= 2;
        }

        // encoder stack
        for l in (0..levels).rev() {
            let c = &convs[l];
            if l + 1 < levels {
                // gradient arriving through the pool below
                let pooled_grad = d_cur;
                let unpooled = maxpool2_backward(
                    &pooled_grad,
                    &cache.pool_argmax[l],
                    c.out_ch,
                    hh,
                    ww,
                );
                hh *= 2;
                ww *= 2;
                d_cur = unpooled;
            }
            if let Some(skip) = &enc_grads[l] {
                for (d, s) in d_cur.iter_mut().zip(skip) {
                    *d += s;
                }
            }
            let input: &[f64] = if l == 0 {
                &cache.input
            } else {
                &cache.pooled_inputs[l - 1]
            };
            let act = &cache.enc_acts[l];
            let d_in = conv3_relu_backward(&self.params, &mut grads, c, input, act, &d_cur, hh, ww);
            d_cur = d_in;
        }
        Ok(grads)
    }
}

#[derive(Debug, Clone)]
struct ConvDesc {
    offset: usize,
    in_ch: usize,
    out_ch: usize,
    kernel: usize,
}

/// Parameter layout: encoder convs (shallow to deep), decoder convs (deep to
/// shallow), then the 1x1 output conv. Weights precede the bias per conv.
fn conv_layout(arch: &Arch) -> Vec<ConvDesc> {
    let Arch::ConvEncDec {
        in_channels,
        base_channels,
        levels,
    } = arch
    else {
        panic!("conv layout requested for non-conv arch");
    };
    let ch = |l: usize| base_channels << l;
    let mut descs = Vec::new();
    let mut off = 0;
    let mut prev = *in_channels;
    for l in 0..*levels {
        descs.push(ConvDesc {
            offset: off,
            in_ch: prev,
            out_ch: ch(l),
            kernel: 3,
        });
        off += ch(l) * prev * 9 + ch(l);
        prev = ch(l);
    }
    for l in (0..levels.saturating_sub(1)).rev() {
        let in_ch = ch(l) + prev;
        descs.push(ConvDesc {
            offset: off,
            in_ch,
            out_ch: ch(l),
            kernel: 3,
        });
        off += ch(l) * in_ch * 9 + ch(l);
        prev = ch(l);
    }
    descs.push(ConvDesc {
        offset: off,
        in_ch: prev,
        out_ch: 1,
        kernel: 1,
    });
    descs
}

fn conv3_relu_forward(
    params: &[f64],
    c: &ConvDesc,
    input: &[f64],
    in_ch: usize,
    h: usize,
    w: usize,
) -> Vec<f64> {
    debug_assert_eq!(in_ch, c.in_ch);
    let w_base = c.offset;
    let b_base = c.offset + c.out_ch * in_ch * 9;
    let mut out = vec![0.0; c.out_ch * h * w];
    for o in 0..c.out_ch {
        for y in 0..h {
            for x in 0..w {
                let mut acc = params[b_base + o];
                for ci in 0..in_ch {
                    let wk = &params[w_base + (o * in_ch + ci) * 9..w_base + (o * in_ch + ci) * 9 + 9];
                    let plane = &input[ci * h * w..(ci + 1) * h * w];
                    for dy in 0..3usize {
                        let iy = y as isize + dy as isize - 1;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        for dx in 0..3usize {
                            let ix = x as isize + dx as isize - 1;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            acc += wk[dy * 3 + dx] * plane[iy as usize * w + ix as usize];
                        }
                    }
                }
                out[o * h * w + y * w + x] = acc.max(0.0);
            }
        }
    }
    out
}

/// Backward through conv3x3+ReLU. Accumulates weight/bias grads into
/// `grads` and returns the gradient w.r.t. the conv input.
fn conv3_relu_backward(
    params: &[f64],
    grads: &mut [f64],
    c: &ConvDesc,
    input: &[f64],
    act: &[f64],
    d_out: &[f64],
    h: usize,
    w: usize,
) -> Vec<f64> {
    let in_ch = c.in_ch;
    let w_base = c.offset;
    let b_base = c.offset + c.out_ch * in_ch * 9;
    let mut d_in = vec![0.0; in_ch * h * w];
    for o in 0..c.out_ch {
        for y in 0..h {
            for x in 0..w {
                let idx = o * h * w + y * w + x;
                // ReLU gate from the cached post-activation
                let g = if act[idx] > 0.0 { d_out[idx] } else { 0.0 };
                if g == 0.0 {
                    continue;
                }
                grads[b_base + o] += g;
                for ci in 0..in_ch {
                    let k_base = w_base + (o * in_ch + ci) * 9;
                    let plane_in = &input[ci * h * w..(ci + 1) * h * w];
                    let plane_d = &mut d_in[ci * h * w..(ci + 1) * h * w];
                    for dy in 0..3usize {
                        let iy = y as isize + dy as isize - 1;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        for dx in 0..3usize {
                            let ix = x as isize + dx as isize - 1;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            let pi = iy as usize * w + ix as usize;
                            grads[k_base + dy * 3 + dx] += g * plane_in[pi];
                            plane_d[pi] += g * params[k_base + dy * 3 + dx];
                        }
                    }
                }
            }
        }
    }
    d_in
}

fn maxpool2_forward(input: &[f64], ch: usize, h: usize, w: usize) -> (Vec<f64>, Vec<usize>) {
    let (oh, ow) = (h / 2, w / 2);
    let mut out = vec![0.0; ch * oh * ow];
    let mut argmax = vec![0usize; ch * oh * ow];
    for c in 0..ch {
        let plane = &input[c * h * w..(c + 1) * h * w];
        for y in 0..oh {
            for x in 0..ow {
                let mut best = f64::NEG_INFINITY;
                let mut best_i = 0;
                for dy in 0..2 {
                    for dx in 0..2 {
                        let i = (2 * y + dy) * w + 2 * x + dx;
                        if plane[i] > best {
                            best = plane[i];
                            best_i = i;
                        }
                    }
                }
                out[c * oh * ow + y * ow + x] = best;
                argmax[c * oh * ow + y * ow + x] = c * h * w + best_i;
            }
        }
    }
    (out, argmax)
}

fn maxpool2_backward(
    d_out: &[f64],
    argmax: &[usize],
    ch: usize,
    oh: usize,
    ow: usize,
) -> Vec<f64> {
    let mut d_in = vec![0.0; ch * oh * ow * 4];
    for (i, &src) in argmax.iter().enumerate() {
        d_in[src] += d_out[i];
    }
    d_in
}

fn upsample2_forward(input: &[f64], ch: usize, h: usize, w: usize) -> Vec<f64> {
    let (oh, ow) = (h * 2, w * 2);
    let mut out = vec![0.0; ch * oh * ow];
    for c in 0..ch {
        for y in 0..oh {
            for x in 0..ow {
                out[c * oh * ow + y * ow + x] = input[c * h * w + (y / 2) * w + x / 2];
            }
        }
    }
    out
}

fn upsample2_backward(d_out: &[f64], ch: usize, h: usize, w: usize) -> Vec<f64> {
    let (oh, ow) = (h * 2, w * 2);
    let mut d_in = vec![0.0; ch * h * w];
    for c in 0..ch {
        for y in 0..oh {
            for x in 0..ow {
                d_in[c * h * w + (y / 2) * w + x / 2] += d_out[c * oh * ow + y * ow + x];
            }
        }
    }
    d_in
}

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamHyper {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

pub const PLATEAU_PATIENCE: u32 = 3;
pub const PLATEAU_FACTOR: f64 = 0.5;
pub const PLATEAU_REL_TOL: f64 = 1e-4;

/// Optimizer moments plus plateau-scheduler state.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
    pub lr: f64,
    pub stale_checks: u32,
    pub reductions: u32,
    pub best_val: Option<f64>,
}

impl OptimState {
    pub fn new(param_count: usize, lr: f64) -> Self {
        Self {
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
            step: 0,
            lr,
            stale_checks: 0,
            reductions: 0,
            best_val: None,
        }
    }
}

/// Bias-corrected Adam update in place.
pub fn adam_step(
    params: &mut ModelParams,
    grads: &[f64],
    state: &mut OptimState,
    hyper: &AdamHyper,
) {
    assert_eq!(params.params.len(), grads.len(), "gradient shape mismatch");
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - hyper.beta1.powi(t);
    let bc2 = 1.0 - hyper.beta2.powi(t);
    for ((p, g), (m, v)) in params
        .params
        .iter_mut()
        .zip(grads)
        .zip(state.m.iter_mut().zip(state.v.iter_mut()))
    {
        *m = hyper.beta1 * *m + (1.0 - hyper.beta1) * g;
        *v = hyper.beta2 * *v + (1.0 - hyper.beta2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= state.lr * m_hat / (v_hat.sqrt() + hyper.eps);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlateauOutcome {
    Improved,
    Stale,
    Reduced,
}

/// One validation check: lower metric is better. Three consecutive checks
/// without relative improvement over the best seen halve the learning rate.
pub fn plateau_scheduler(state: &mut OptimState, val_metric: f64) -> PlateauOutcome {
    match state.best_val {
        None => {
            state.best_val = Some(val_metric);
            PlateauOutcome::Improved
        }
        Some(best) => {
            if val_metric < best - PLATEAU_REL_TOL * best.abs() {
                state.best_val = Some(val_metric);
                state.stale_checks = 0;
                PlateauOutcome::Improved
            } else {
                state.stale_checks += 1;
                if state.stale_checks >= PLATEAU_PATIENCE {
                    state.lr *= PLATEAU_FACTOR;
                    state.stale_checks = 0;
                    state.reductions += 1;
                    PlateauOutcome::Reduced
                } else {
                    PlateauOutcome::Stale
                }
            }
        }
    }
}

/// Serialize as: magic "DDA1", version u32, arch kind u32, descriptor word
/// count u32, descriptor words u32 each, parameter count u64, parameters as
/// little-endian f64 in layer order.
pub fn checkpoint_bytes(params: &ModelParams) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    let (kind, desc): (u32, Vec<u32>) = match &params.arch {
        Arch::Mlp { layers } => (0, layers.iter().map(|&s| s as u32).collect()),
        Arch::ConvEncDec {
            in_channels,
            base_channels,
            levels,
        } => (
            1,
            vec![*in_channels as u32, *base_channels as u32, *levels as u32],
        ),
    };
    out.extend_from_slice(&kind.to_le_bytes());
    out.extend_from_slice(&(desc.len() as u32).to_le_bytes());
    for d in desc {
        out.extend_from_slice(&d.to_le_bytes());
    }
    out.extend_from_slice(&(params.params.len() as u64).to_le_bytes());
    for p in &params.params {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

pub fn parse_checkpoint(bytes: &[u8]) -> Result<ModelParams> {
    let mut pos = 0usize;
    let take = |pos: &mut usize, n: usize| -> Result<&[u8]> {
        if *pos + n > bytes.len() {
            return Err(DdaError::Checkpoint(format!(
                "truncated at byte {} (needed {} more)",
                *pos, n
            )));
        }
        let s = &bytes[*pos..*pos + n];
        *pos += n;
        Ok(s)
    };
    let magic = take(&mut pos, 4)?;
    if magic != CHECKPOINT_MAGIC {
        return Err(DdaError::Checkpoint(format!(
            "bad magic {:02x?}, expected {:02x?} (\"DDA1\")",
            magic, CHECKPOINT_MAGIC
        )));
    }
    let version = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(DdaError::Checkpoint(format!(
            "unsupported version {version}"
        )));
    }
    let kind = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap());
    let desc_len = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
    let mut desc = Vec::with_capacity(desc_len);
    for _ in 0..desc_len {
        desc.push(u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize);
    }
    let arch = match kind {
        0 => Arch::Mlp { layers: desc },
        1 => {
            if desc.len() != 3 {
                return Err(DdaError::Checkpoint(
                    "conv descriptor must have 3 words".into(),
                ));
            }
            Arch::ConvEncDec {
                in_channels: desc[0],
                base_channels: desc[1],
                levels: desc[2],
            }
        }
        k => return Err(DdaError::Checkpoint(format!("unknown arch kind {k}"))),
    };
    arch.validate()
        .map_err(|e| DdaError::Checkpoint(format!("invalid architecture: {e}")))?;
    let count = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()) as usize;
    if count != arch.param_count() {
        return Err(DdaError::Checkpoint(format!(
            "parameter count {count} does not match architecture ({})",
            arch.param_count()
        )));
    }
    let mut params = Vec::with_capacity(count);
    for _ in 0..count {
        params.push(f64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()));
    }
    if pos != bytes.len() {
        return Err(DdaError::Checkpoint(format!(
            "{} trailing bytes after parameters",
            bytes.len() - pos
        )));
    }
    Ok(ModelParams { arch, params })
}

pub fn save_checkpoint(params: &ModelParams, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(&checkpoint_bytes(params))?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<ModelParams> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    parse_checkpoint(&bytes)
}
