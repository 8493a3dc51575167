#include "rpcm/fisher.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace rpcm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void accumulate_rank_one(Eigen::MatrixXd& m, const Item& x, double coeff) {
  // f(x) = (1, x): only rows/cols {0} u {j+1 : x_j = 1} are touched.
  int idx[kMaxFeatures + 1];
  int nidx = 0;
  idx[nidx++] = 0;
  for (int j = 0; j < x.k(); ++j)
    if (x.feature(j)) idx[nidx++] = j + 1;
  for (int r = 0; r < nidx; ++r)
    for (int c = 0; c < nidx; ++c) m(idx[r], idx[c]) += coeff;
}
}  // namespace

InfoMatrix::InfoMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw std::invalid_argument("InfoMatrix: matrix must be square");
  if (!m.allFinite())
    throw std::domain_error("InfoMatrix: non-finite entries");
  m_ = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_);
  if (es.info() != Eigen::Success)
    throw std::domain_error("InfoMatrix: eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  const double lo = ev(0);
  const double hi = ev(ev.size() - 1);
  singular_ = !(hi > 0.0) || lo <= hi / kSingularConditionLimit;
  cond_ = singular_ ? kInf : hi / lo;
  if (singular_) {
    logdet_ = -kInf;
  } else {
    logdet_ = 0.0;
    for (int i = 0; i < ev.size(); ++i) logdet_ += std::log(ev(i));
    inv_ = es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
           es.eigenvectors().transpose();
  }
}

const Eigen::MatrixXd& InfoMatrix::inverse() const {
  if (singular_) throw std::domain_error("InfoMatrix: singular matrix has no inverse");
  return inv_;
}

InfoMatrix info_matrix(const Design& d, const ModelSpec& m) {
  m.validate();
  if (d.k() != m.k)
    throw std::invalid_argument("info_matrix: design and model K differ");
  const int p = m.p();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
  for (const auto& pt : d.points()) {
    if (pt.weight == 0.0) continue;
    const double coeff = pt.weight / inverse_weight(pt.item, m);
    if (!std::isfinite(coeff))
      throw std::domain_error("info_matrix: non-finite information weight");
    accumulate_rank_one(out, pt.item, coeff);
  }
  return InfoMatrix(out);
}

Eigen::MatrixXd info_from_weights(const std::vector<double>& weights,
                                  const WeightForm& q) {
  const std::size_t nverts = std::size_t{1} << q.k;
  if (weights.size() != nverts)
    throw std::invalid_argument("info_from_weights: weights size must be 2^K");
  const int p = q.k + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
  for (std::uint32_t r = 0; r < nverts; ++r) {
    if (weights[r] == 0.0) continue;
    const double coeff = weights[r] / q.at_rank(r);
    if (!std::isfinite(coeff))
      throw std::domain_error("info_from_weights: non-finite information weight");
    accumulate_rank_one(out, Item(q.k, r), coeff);
  }
  return out;
}

double log_det(const InfoMatrix& m) { return m.log_det(); }

double sensitivity(const Item& x, const InfoMatrix& info, const ModelSpec& m) {
  if (info.singular())
    throw std::domain_error("sensitivity: singular information matrix");
  if (x.k() != m.k)
    throw std::invalid_argument("sensitivity: item length does not match model K");
  const Eigen::MatrixXd& minv = info.inverse();
  int idx[kMaxFeatures + 1];
  int nidx = 0;
  idx[nidx++] = 0;
  for (int j = 0; j < x.k(); ++j)
    if (x.feature(j)) idx[nidx++] = j + 1;
  double quad = 0.0;
  for (int r = 0; r < nidx; ++r)
    for (int c = 0; c < nidx; ++c) quad += minv(idx[r], idx[c]);
  return quad / inverse_weight(x, m);
}

double sensitivity(const Item& x, const Design& d, const ModelSpec& m) {
  return sensitivity(x, info_matrix(d, m), m);
}

double closed_form_sensitivity_xi0(const Item& x, const StandardizedParams& s) {
  s.validate();
  if (x.k() != s.k())
    throw std::invalid_argument("closed_form_sensitivity_xi0: item length does not match K");
  const int k = s.k();
  const double q0 = s.b_scale + 1.0;
  const double ones = x.ones();
  double acc = (ones - 1.0) * (ones - 1.0) * q0;
  for (int j = 0; j < k; ++j)
    if (x.feature(j)) acc += s.b_scale + std::exp(-s.effects[j]);
  return (k + 1) * acc / standardized_inverse_weight(x, s);
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os.precision(17);
  for (int c = 0; c < m.cols(); ++c) {
    if (c) os << ',';
    os << 'b' << c;
  }
  os << '\n';
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      os << m(r, c);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace rpcm
