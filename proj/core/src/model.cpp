#include "rsed/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>

namespace rsed {
namespace {

using Vector = Eigen::VectorXd;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

// Per-direction recurrence state, indexed by time (not processing order).
struct GruTrace {
  Matrix gates_in;  // T2 x 3H, input projection + bias
  Matrix z, r, cand, h;
};

struct Trace {
  Matrix act;                 // T x C, post-ReLU
  std::vector<int> pool_src;  // T2*C source frame of each pooled value
  Matrix pooled;              // T2 x C
  GruTrace dir[2];
  std::vector<double> logits;
};

void run_gru(const Matrix& pooled, ConstMatrixMap w, ConstMatrixMap u, ConstMatrixMap b,
             int step, GruTrace& tr) {
  const Eigen::Index steps = pooled.rows();
  const Eigen::Index h = u.cols();
  tr.gates_in = pooled * w.transpose();
  tr.gates_in.rowwise() += b.row(0);
  tr.z.resize(steps, h);
  tr.r.resize(steps, h);
  tr.cand.resize(steps, h);
  tr.h.resize(steps, h);
  Vector state = Vector::Zero(h);
  Vector zr(2 * h), rh(h), cand(h);
  for (Eigen::Index i = 0; i < steps; ++i) {
    const Eigen::Index t = step > 0 ? i : steps - 1 - i;
    const auto g = tr.gates_in.row(t);
    zr.noalias() = u.topRows(2 * h) * state;
    zr += g.head(2 * h).transpose();
    for (Eigen::Index k = 0; k < 2 * h; ++k) zr[k] = sigmoid(zr[k]);
    rh = zr.tail(h).cwiseProduct(state);
    cand.noalias() = u.bottomRows(h) * rh;
    cand += g.tail(h).transpose();
    cand = cand.array().tanh().matrix();
    state = (1.0 - zr.head(h).array()) * state.array() + zr.head(h).array() * cand.array();
    tr.z.row(t) = zr.head(h).transpose();
    tr.r.row(t) = zr.tail(h).transpose();
    tr.cand.row(t) = cand.transpose();
    tr.h.row(t) = state.transpose();
  }
}

// Returns d(loss)/d(gates_in) (T2 x 3H); accumulates into dU.
Matrix backprop_gru(const GruTrace& tr, const Matrix& dh_out, ConstMatrixMap u, int step,
                    MatrixMap du) {
  const Eigen::Index steps = tr.h.rows();
  const Eigen::Index h = u.cols();
  Matrix dgates(steps, 3 * h);
  Vector carry = Vector::Zero(h);
  Vector zero = Vector::Zero(h);
  Vector dh(h), dz(h), dcand(h), dgz(h), dgr(h), dgc(h), drh(h), hprev(h), rh(h);
  // Reverse of processing order.
  for (Eigen::Index i = steps - 1; i >= 0; --i) {
    const Eigen::Index t = step > 0 ? i : steps - 1 - i;
    const Eigen::Index prev = t - step;
    if (prev >= 0 && prev < steps) hprev = tr.h.row(prev).transpose();
    else hprev = zero;
    const auto z = tr.z.row(t).transpose().array();
    const auto r = tr.r.row(t).transpose().array();
    const auto c = tr.cand.row(t).transpose().array();

    dh = dh_out.row(t).transpose() + carry;
    dz = (dh.array() * (c - hprev.array())).matrix();
    dcand = (dh.array() * z).matrix();
    carry = (dh.array() * (1.0 - z)).matrix();

    dgc = (dcand.array() * (1.0 - c.square())).matrix();
    drh.noalias() = u.bottomRows(h).transpose() * dgc;
    dgr = (drh.array() * hprev.array() * r * (1.0 - r)).matrix();
    carry.array() += drh.array() * r;
    dgz = (dz.array() * z * (1.0 - z)).matrix();
    carry.noalias() += u.topRows(h).transpose() * dgz;
    carry.noalias() += u.middleRows(h, h).transpose() * dgr;

    rh = (r * hprev.array()).matrix();
    du.topRows(h).noalias() += dgz * hprev.transpose();
    du.middleRows(h, h).noalias() += dgr * hprev.transpose();
    du.bottomRows(h).noalias() += dgc * rh.transpose();

    dgates.row(t).head(h) = dgz.transpose();
    dgates.row(t).segment(h, h) = dgr.transpose();
    dgates.row(t).tail(h) = dgc.transpose();
  }
  return dgates;
}

void check_input(const ModelParams& m, const Matrix& x) {
  if (x.cols() != m.dims().feature_width) {
    throw PreconditionError("feature width " + std::to_string(x.cols()) +
                            " does not match model width " +
                            std::to_string(m.dims().feature_width));
  }
  if (x.rows() < 1) throw PreconditionError("empty feature matrix");
}

Trace run_forward(const ModelParams& m, const Matrix& x) {
  check_input(m, x);
  const ModelDims& d = m.dims();
  const Eigen::Index frames = x.rows();
  const Eigen::Index f = d.feature_width;
  const Eigen::Index c = d.conv_channels;
  Trace tr;

  const auto conv_w = m.view(ModelParams::kConvW);
  tr.act = Matrix::Zero(frames, c);
  tr.act.rowwise() += m.view(ModelParams::kConvB).row(0);
  for (int k = 0; k < d.kernel; ++k) {
    const Eigen::Index off = k - d.kernel / 2;
    const Eigen::Index t0 = std::max<Eigen::Index>(0, -off);
    const Eigen::Index t1 = std::min<Eigen::Index>(frames, frames - off);
    if (t1 <= t0) continue;
    tr.act.middleRows(t0, t1 - t0).noalias() +=
        x.middleRows(t0 + off, t1 - t0) * conv_w.middleCols(k * f, f).transpose();
  }
  tr.act = tr.act.cwiseMax(0.0);

  const Eigen::Index steps = (frames + 1) / 2;
  tr.pooled.resize(steps, c);
  tr.pool_src.resize(static_cast<std::size_t>(steps * c));
  for (Eigen::Index j = 0; j < steps; ++j) {
    for (Eigen::Index ch = 0; ch < c; ++ch) {
      Eigen::Index src = 2 * j;
      if (2 * j + 1 < frames && tr.act(2 * j + 1, ch) > tr.act(src, ch)) src = 2 * j + 1;
      tr.pooled(j, ch) = tr.act(src, ch);
      tr.pool_src[static_cast<std::size_t>(j * c + ch)] = static_cast<int>(src);
    }
  }

  run_gru(tr.pooled, m.view(ModelParams::kFwdW), m.view(ModelParams::kFwdU),
          m.view(ModelParams::kFwdB), +1, tr.dir[0]);
  run_gru(tr.pooled, m.view(ModelParams::kBwdW), m.view(ModelParams::kBwdU),
          m.view(ModelParams::kBwdB), -1, tr.dir[1]);

  const auto head_w = m.view(ModelParams::kHeadW);
  const double head_b = m.view(ModelParams::kHeadB)(0, 0);
  const Eigen::Index h = d.hidden;
  const Vector wf = head_w.row(0).head(h).transpose();
  const Vector wb = head_w.row(0).tail(h).transpose();
  const Vector logits = tr.dir[0].h * wf + tr.dir[1].h * wb;
  tr.logits.resize(static_cast<std::size_t>(steps));
  for (Eigen::Index t = 0; t < steps; ++t) tr.logits[static_cast<std::size_t>(t)] = logits[t] + head_b;
  return tr;
}

std::vector<ParamBlock> layout(const ModelDims& d) {
  const int c = d.conv_channels, h = d.hidden;
  std::vector<ParamBlock> blocks;
  std::size_t off = 0;
  const auto add = [&](std::string name, int rows, int cols) {
    blocks.push_back({std::move(name), off, rows, cols});
    off += blocks.back().size();
  };
  add("conv.w", c, d.kernel * d.feature_width);
  add("conv.b", 1, c);
  for (const char* dir : {"fwd", "bwd"}) {
    add(std::string(dir) + ".W", 3 * h, c);
    add(std::string(dir) + ".U", 3 * h, h);
    add(std::string(dir) + ".b", 1, 3 * h);
  }
  add("head.w", 1, 2 * h);
  add("head.b", 1, 1);
  return blocks;
}

void put_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void put_le(std::ostream& os, T v) {
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  put_bytes(os, b, sizeof(T));
}

class Reader {
 public:
  Reader(std::vector<unsigned char> bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}
  template <typename T>
  T get() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(bytes_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == bytes_.size(); }
  [[noreturn]] void corrupt(const std::string& why) const {
    throw DataError("corrupt model file (" + why + "): " + path_);
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) corrupt("truncated");
  }
  std::vector<unsigned char> bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

constexpr char kMagic[8] = {'R', 'S', 'E', 'D', 'M', 'D', 'L', '\0'};

}  // namespace

ModelParams::ModelParams(const ModelDims& dims, EventKind task)
    : dims_(dims), task_(task), blocks_(layout(dims)) {
  if (dims.feature_width < 1 || dims.conv_channels < 1 || dims.hidden < 1 || dims.kernel < 1 ||
      dims.kernel % 2 == 0) {
    throw PreconditionError("invalid model dimensions");
  }
  values_.assign(blocks_.back().offset + blocks_.back().size(), 0.0);
}

std::vector<ParamBlock> ModelParams::gate_blocks() const {
  std::vector<ParamBlock> out;
  out.push_back(blocks_[kConvW]);
  out.push_back(blocks_[kConvB]);
  const int h = dims_.hidden;
  const char* gates[] = {"update", "reset", "candidate"};
  for (std::size_t base : {std::size_t{kFwdW}, std::size_t{kBwdW}}) {
    const std::string dir = base == kFwdW ? "fwd" : "bwd";
    for (int g = 0; g < 3; ++g) {
      const auto& w = blocks_[base];
      const auto& u = blocks_[base + 1];
      const auto& b = blocks_[base + 2];
      out.push_back({dir + "." + gates[g] + ".W", w.offset + static_cast<std::size_t>(g * h * w.cols), h, w.cols});
      out.push_back({dir + "." + gates[g] + ".U", u.offset + static_cast<std::size_t>(g * h * u.cols), h, u.cols});
      out.push_back({dir + "." + gates[g] + ".b", b.offset + static_cast<std::size_t>(g * h), 1, h});
    }
  }
  out.push_back(blocks_[kHeadW]);
  out.push_back(blocks_[kHeadB]);
  return out;
}

ConstMatrixMap ModelParams::view(std::size_t block) const {
  const auto& b = blocks_.at(block);
  return ConstMatrixMap(values_.data() + b.offset, b.rows, b.cols);
}

MatrixMap ModelParams::view(std::size_t block) {
  const auto& b = blocks_.at(block);
  return MatrixMap(values_.data() + b.offset, b.rows, b.cols);
}

MatrixMap ModelParams::view(std::size_t block, std::span<double> external) const {
  const auto& b = blocks_.at(block);
  if (external.size() != values_.size()) throw PreconditionError("gradient buffer size mismatch");
  return MatrixMap(external.data() + b.offset, b.rows, b.cols);
}

ModelParams init_model(const ModelDims& dims, EventKind task, uint64_t seed) {
  ModelParams m(dims, task);
  std::mt19937_64 rng(seed);
  const auto fill = [&](std::size_t block, int fan_in) {
    const double limit = std::sqrt(3.0 / fan_in);
    std::uniform_real_distribution<double> dist(-limit, limit);
    auto v = m.view(block);
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < v.cols(); ++j) v(i, j) = dist(rng);
  };
  fill(ModelParams::kConvW, dims.kernel * dims.feature_width);
  fill(ModelParams::kFwdW, dims.conv_channels);
  fill(ModelParams::kFwdU, dims.hidden);
  fill(ModelParams::kBwdW, dims.conv_channels);
  fill(ModelParams::kBwdU, dims.hidden);
  fill(ModelParams::kHeadW, 2 * dims.hidden);
  return m;
}

SegmentProbabilities forward(const ModelParams& model, const Matrix& features) {
  const Trace tr = run_forward(model, features);
  SegmentProbabilities out;
  out.task = model.task();
  out.p.resize(tr.logits.size());
  for (std::size_t t = 0; t < tr.logits.size(); ++t) out.p[t] = sigmoid(tr.logits[t]);
  return out;
}

double loss(const ModelParams& model, const Matrix& features, std::span<const double> target) {
  const Trace tr = run_forward(model, features);
  if (target.size() != tr.logits.size()) throw PreconditionError("target length mismatch");
  double sum = 0.0;
  for (std::size_t t = 0; t < target.size(); ++t) {
    sum += softplus(tr.logits[t]) - target[t] * tr.logits[t];
  }
  return sum / static_cast<double>(target.size());
}

double loss_and_grad(const ModelParams& model, const Matrix& features,
                     std::span<const double> target, std::span<double> grad_accum) {
  const Trace tr = run_forward(model, features);
  const std::size_t steps = tr.logits.size();
  if (target.size() != steps) throw PreconditionError("target length mismatch");
  const ModelDims& d = model.dims();
  const Eigen::Index h = d.hidden;
  const Eigen::Index c = d.conv_channels;
  const Eigen::Index f = d.feature_width;
  const Eigen::Index frames = features.rows();

  double sum = 0.0;
  Vector dlogit(static_cast<Eigen::Index>(steps));
  const double inv = 1.0 / static_cast<double>(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    sum += softplus(tr.logits[t]) - target[t] * tr.logits[t];
    dlogit[static_cast<Eigen::Index>(t)] = (sigmoid(tr.logits[t]) - target[t]) * inv;
  }

  // Head.
  const auto head_w = model.view(ModelParams::kHeadW);
  auto g_head_w = model.view(ModelParams::kHeadW, grad_accum);
  g_head_w.row(0).head(h) += (tr.dir[0].h.transpose() * dlogit).transpose();
  g_head_w.row(0).tail(h) += (tr.dir[1].h.transpose() * dlogit).transpose();
  model.view(ModelParams::kHeadB, grad_accum)(0, 0) += dlogit.sum();

  // Recurrent layers.
  Matrix dpooled = Matrix::Zero(static_cast<Eigen::Index>(steps), c);
  const std::size_t wblk[2] = {ModelParams::kFwdW, ModelParams::kBwdW};
  for (int dir = 0; dir < 2; ++dir) {
    const Vector wh = dir == 0 ? Vector(head_w.row(0).head(h).transpose())
                               : Vector(head_w.row(0).tail(h).transpose());
    const Matrix dh_out = dlogit * wh.transpose();
    const std::size_t wb = wblk[dir];
    const Matrix dgates = backprop_gru(tr.dir[dir], dh_out, model.view(wb + 1), dir == 0 ? +1 : -1,
                                       model.view(wb + 1, grad_accum));
    model.view(wb, grad_accum).noalias() += dgates.transpose() * tr.pooled;
    model.view(wb + 2, grad_accum).row(0) += dgates.colwise().sum();
    dpooled.noalias() += dgates * model.view(wb);
  }

  // Pool + ReLU.
  Matrix dact = Matrix::Zero(frames, c);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(steps); ++j) {
    for (Eigen::Index ch = 0; ch < c; ++ch) {
      const int src = tr.pool_src[static_cast<std::size_t>(j * c + ch)];
      if (tr.act(src, ch) > 0.0) dact(src, ch) += dpooled(j, ch);
    }
  }

  // Convolution.
  auto g_conv_w = model.view(ModelParams::kConvW, grad_accum);
  model.view(ModelParams::kConvB, grad_accum).row(0) += dact.colwise().sum();
  for (int k = 0; k < d.kernel; ++k) {
    const Eigen::Index off = k - d.kernel / 2;
    const Eigen::Index t0 = std::max<Eigen::Index>(0, -off);
    const Eigen::Index t1 = std::min<Eigen::Index>(frames, frames - off);
    if (t1 <= t0) continue;
    g_conv_w.middleCols(k * f, f).noalias() +=
        dact.middleRows(t0, t1 - t0).transpose() * features.middleRows(t0 + off, t1 - t0);
  }
  return sum * inv;
}

ModelParams mirror_directions(const ModelParams& model) {
  ModelParams out = model;
  const ModelDims& d = model.dims();
  const Eigen::Index f = d.feature_width;
  for (int k = 0; k < d.kernel; ++k) {
    out.view(ModelParams::kConvW).middleCols(k * f, f) =
        model.view(ModelParams::kConvW).middleCols((d.kernel - 1 - k) * f, f);
  }
  for (std::size_t i = 0; i < 3; ++i) {
    out.view(ModelParams::kFwdW + i) = model.view(ModelParams::kBwdW + i);
    out.view(ModelParams::kBwdW + i) = model.view(ModelParams::kFwdW + i);
  }
  const Eigen::Index h = d.hidden;
  out.view(ModelParams::kHeadW).row(0).head(h) = model.view(ModelParams::kHeadW).row(0).tail(h);
  out.view(ModelParams::kHeadW).row(0).tail(h) = model.view(ModelParams::kHeadW).row(0).head(h);
  return out;
}

void save_model(const ModelParams& model, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write model file: " + path.string());
  put_bytes(os, kMagic, sizeof(kMagic));
  put_le<uint32_t>(os, kModelFormatVersion);
  put_le<uint8_t>(os, static_cast<uint8_t>(to_char(model.task())));
  const ModelDims& d = model.dims();
  for (int v : {d.feature_width, d.conv_channels, d.kernel, d.hidden}) put_le<uint32_t>(os, static_cast<uint32_t>(v));
  put_le<uint32_t>(os, static_cast<uint32_t>(model.blocks().size()));
  for (const auto& b : model.blocks()) {
    put_le<uint16_t>(os, static_cast<uint16_t>(b.name.size()));
    put_bytes(os, b.name.data(), b.name.size());
    put_le<uint32_t>(os, static_cast<uint32_t>(b.rows));
    put_le<uint32_t>(os, static_cast<uint32_t>(b.cols));
  }
  put_le<uint64_t>(os, model.values().size());
  for (double v : model.values()) {
    uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    put_le<uint64_t>(os, bits);
  }
  if (!os) throw DataError("write failed: " + path.string());
}

ModelParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path.string());
  Reader r(std::vector<unsigned char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()),
           path.string());
  if (r.get_string(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) r.corrupt("bad magic");
  const auto version = r.get<uint32_t>();
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model file version " + std::to_string(version) + ": " + path.string());
  }
  const char tag = static_cast<char>(r.get<uint8_t>());
  EventKind task;
  try {
    task = parse_kind(std::string(1, tag));
  } catch (const DataError&) {
    r.corrupt("bad task tag");
  }
  ModelDims d;
  d.feature_width = static_cast<int>(r.get<uint32_t>());
  d.conv_channels = static_cast<int>(r.get<uint32_t>());
  d.kernel = static_cast<int>(r.get<uint32_t>());
  d.hidden = static_cast<int>(r.get<uint32_t>());
  ModelParams m;
  try {
    m = ModelParams(d, task);
  } catch (const PreconditionError&) {
    r.corrupt("bad dimensions");
  }
  const auto nblocks = r.get<uint32_t>();
  if (nblocks != m.blocks().size()) r.corrupt("block count");
  for (const auto& b : m.blocks()) {
    const auto len = r.get<uint16_t>();
    if (r.get_string(len) != b.name) r.corrupt("block name");
    if (static_cast<int>(r.get<uint32_t>()) != b.rows || static_cast<int>(r.get<uint32_t>()) != b.cols) {
      r.corrupt("block shape");
    }
  }
  if (r.get<uint64_t>() != m.values().size()) r.corrupt("value count");
  for (double& v : m.values()) {
    const auto bits = r.get<uint64_t>();
    std::memcpy(&v, &bits, sizeof(v));
  }
  if (!r.at_end()) r.corrupt("trailing bytes");
  return m;
}

}  // namespace rsed
