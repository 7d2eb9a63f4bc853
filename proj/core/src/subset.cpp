#include "igwr/subset.hpp"

#include <bit>
#include <cmath>
#include <queue>
#include <unordered_map>

#include "igwr/kernel.hpp"
#include "igwr/wls.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace igwr {
namespace {

using Bits = std::uint64_t;

inline Bits bit(arma::uword j) { return Bits{1} << j; }

inline std::uint64_t index_sum_of(Bits bits) {
  std::uint64_t s = 0;
  while (bits) {
    const int j = std::countr_zero(bits);
    s += static_cast<std::uint64_t>(j);
    bits &= bits - 1;
  }
  return s;
}

inline double tie_slack(double a, double b) {
  return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

struct Candidate {
  Bits bits = 0;
  double wsse = arma::datum::inf;
  std::uint64_t index_sum = 0;
  bool valid = false;
};

// Strictly-lower WSSE wins; within the tie slack the smaller index sum does.
bool improves(const Candidate& challenger, const Candidate& incumbent) {
  if (!incumbent.valid) return true;
  const double slack = tie_slack(challenger.wsse, incumbent.wsse);
  if (challenger.wsse < incumbent.wsse - slack) return true;
  if (challenger.wsse > incumbent.wsse + slack) return false;
  return challenger.index_sum < incumbent.index_sum;
}

// Per-call state for one MP_beta solve: fixed weights, the constant gamma
// term, and a WSSE cache keyed by column-set bits (branch-and-bound revisits
// overlapping sets, and the include branch shares its parent's bound set).
class MpBetaEvaluator {
 public:
  MpBetaEvaluator(const SpatialDataset& ds, const DistanceMatrix& dm,
                  const BandwidthField& bw, const SolverConfig& cfg)
      : ds_(ds), dm_(dm), ridge_(cfg.wls_ridge) {
    const arma::uword c = ds.n_focal();
    gamma_ = bw.expanded(c);
    gamma_term_ = 0.0;
    for (arma::uword o = 0; o < c; ++o)
      gamma_term_ += gamma_[o] * dm.squared_row_sums[o];
    weights_.resize(c);
    for (arma::uword o = 0; o < c; ++o)
      weights_[o] = weight_row(dm.d.row(o).t(), gamma_[o]).w;
  }

  double gamma_term() const { return gamma_term_; }
  bool ridge_used() const { return ridge_used_; }

  double total_wsse(Bits bits) {
    auto it = cache_.find(bits);
    if (it != cache_.end()) return it->second;

    const arma::uvec cols = columns_for(bits);
    const arma::uword c = ds_.n_focal();
    arma::vec per_focal(c, arma::fill::zeros);
    std::exception_ptr error;
    bool any_ridge = false;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(|| : any_ridge)
#endif
    for (long long oo = 0; oo < static_cast<long long>(c); ++oo) {
      const arma::uword o = static_cast<arma::uword>(oo);
      try {
        WlsSolution sol = wls_fit_cols(ds_.X, ds_.y, weights_[o], cols,
                                       ds_.X.row(0), ridge_);
        per_focal[o] = sol.wsse;
        any_ridge = any_ridge || sol.ridge_used;
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    if (any_ridge) ridge_used_ = true;

    // Reduce in fixed focal order.
    double total = 0.0;
    for (arma::uword o = 0; o < c; ++o) total += per_focal[o];
    cache_.emplace(bits, total);
    return total;
  }

  // Full per-focal fit at the winning mask: coefficients and the c x n error
  // matrix e_oi = y_i - x_i . beta_o.
  void extract(Bits bits, CoefficientField* beta, arma::mat* errors) {
    const arma::uvec cols = columns_for(bits);
    const arma::uword c = ds_.n_focal();
    const arma::uword n = ds_.n_obs();
    beta->beta.zeros(c, ds_.n_vars());
    errors->set_size(c, n);
    const arma::mat Xs = ds_.X.cols(cols);
    std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long oo = 0; oo < static_cast<long long>(c); ++oo) {
      const arma::uword o = static_cast<arma::uword>(oo);
      try {
        WlsSolution sol = wls_fit_cols(ds_.X, ds_.y, weights_[o], cols,
                                       ds_.X.row(0), ridge_);
        for (arma::uword k = 0; k < cols.n_elem; ++k)
          beta->beta(o, cols[k]) = sol.beta_sub[k];
        errors->row(o) = (ds_.y - Xs * sol.beta_sub).t();
        if (sol.ridge_used) ridge_used_ = true;
      } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  }

 private:
  arma::uvec columns_for(Bits bits) const {
    std::vector<arma::uword> cols;
    if (ds_.has_intercept) cols.push_back(0);
    Bits rest = bits;
    while (rest) {
      cols.push_back(static_cast<arma::uword>(std::countr_zero(rest)));
      rest &= rest - 1;
    }
    return arma::uvec(cols);
  }

  const SpatialDataset& ds_;
  const DistanceMatrix& dm_;
  arma::vec gamma_;
  double gamma_term_ = 0.0;
  double ridge_ = 0.0;
  std::vector<arma::vec> weights_;
  std::unordered_map<Bits, double> cache_;
  bool ridge_used_ = false;
};

double binomial(arma::uword n, arma::uword k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (arma::uword i = 1; i <= k; ++i)
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

struct SearchProblem {
  arma::uvec free_cols;
  std::vector<Bits> partners;  // partner bits per design column
  Bits free_bits = 0;
  arma::uword p = 0;

  bool pair_feasible(Bits mask) const {
    Bits rest = mask;
    while (rest) {
      const int j = std::countr_zero(rest);
      if (partners[static_cast<std::size_t>(j)] & mask) return false;
      rest &= rest - 1;
    }
    return true;
  }
};

SearchProblem make_problem(const SpatialDataset& ds, arma::uword p,
                           const std::vector<IndexPair>& forbidden_pairs) {
  if (ds.n_vars() > 64)
    throw Exception(ErrorCode::ShapeMismatch,
                    "subset search supports at most 64 columns");
  SearchProblem prob;
  prob.free_cols = ds.free_columns();
  prob.p = p;
  if (p > prob.free_cols.n_elem)
    throw Exception(ErrorCode::InfeasibleCardinality,
                    "p exceeds the number of selectable columns");
  if (!ds.has_intercept && p == 0)
    throw Exception(ErrorCode::InfeasibleCardinality,
                    "p == 0 with no intercept leaves nothing to fit");
  for (arma::uword j : prob.free_cols) prob.free_bits |= bit(j);
  prob.partners.assign(ds.n_vars(), 0);
  for (const auto& [j, k] : forbidden_pairs) {
    if (j >= ds.n_vars() || k >= ds.n_vars())
      throw Exception(ErrorCode::ShapeMismatch, "forbidden pair index out of range");
    prob.partners[j] |= bit(k);
    prob.partners[k] |= bit(j);
  }
  return prob;
}

void exhaustive_search(const SearchProblem& prob, MpBetaEvaluator& eval,
                       Candidate* incumbent, SubsetSearchStats* stats) {
  std::vector<arma::uword> chosen;
  chosen.reserve(prob.p);
  // Lexicographic recursion over ascending index tuples.
  auto rec = [&](auto&& self, arma::uword start, Bits mask, Bits blocked) -> void {
    if (chosen.size() == prob.p) {
      ++stats->leaves_evaluated;
      Candidate cand{mask, eval.total_wsse(mask), index_sum_of(mask), true};
      if (improves(cand, *incumbent)) {
        if (incumbent->valid) ++stats->incumbent_updates;
        *incumbent = cand;
      }
      return;
    }
    const arma::uword need = prob.p - static_cast<arma::uword>(chosen.size());
    for (arma::uword t = start; t + need <= prob.free_cols.n_elem; ++t) {
      const arma::uword j = prob.free_cols[t];
      if (blocked & bit(j)) continue;
      chosen.push_back(j);
      self(self, t + 1, mask | bit(j), blocked | prob.partners[j]);
      chosen.pop_back();
    }
  };
  rec(rec, 0, 0, 0);
}

struct BnbNode {
  double bound = 0.0;
  std::uint64_t seq = 0;
  Bits in = 0;
  Bits out = 0;
};

struct BnbNodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;  // FIFO among equal bounds keeps runs deterministic
  }
};

void branch_and_bound_search(const SearchProblem& prob, MpBetaEvaluator& eval,
                             Candidate* incumbent, SubsetSearchStats* stats) {
  const auto try_candidate = [&](Bits mask) {
    ++stats->leaves_evaluated;
    Candidate cand{mask, eval.total_wsse(mask), index_sum_of(mask), true};
    if (improves(cand, *incumbent)) {
      if (incumbent->valid) ++stats->incumbent_updates;
      *incumbent = cand;
    }
  };

  std::priority_queue<BnbNode, std::vector<BnbNode>, BnbNodeOrder> frontier;
  std::uint64_t seq = 0;

  const auto push_or_close = [&](Bits in, Bits out) {
    const Bits undecided = prob.free_bits & ~in & ~out;
    const auto n_in = static_cast<arma::uword>(std::popcount(in));
    const auto n_un = static_cast<arma::uword>(std::popcount(undecided));
    if (n_in > prob.p || n_in + n_un < prob.p) return;  // infeasible branch
    if (n_in == prob.p) {
      try_candidate(in);
      return;
    }
    if (n_in + n_un == prob.p) {
      // Forced completion; only valid if the undecided set is conflict-free.
      const Bits mask = in | undecided;
      if (prob.pair_feasible(mask)) try_candidate(mask);
      return;
    }
    frontier.push(BnbNode{eval.total_wsse(in | undecided), seq++, in, out});
  };

  push_or_close(0, 0);
  while (!frontier.empty()) {
    const BnbNode node = frontier.top();
    frontier.pop();
    if (incumbent->valid &&
        node.bound > incumbent->wsse + tie_slack(node.bound, incumbent->wsse)) {
      // Best-first: every remaining bound is at least this one.
      stats->nodes_pruned += 1 + frontier.size();
      break;
    }
    ++stats->nodes_expanded;
    const Bits undecided = prob.free_bits & ~node.in & ~node.out;
    const auto j = static_cast<arma::uword>(std::countr_zero(undecided));
    // Include j (and evict its forbidden partners), or exclude j.
    push_or_close(node.in | bit(j), node.out | (prob.partners[j] & ~node.in));
    push_or_close(node.in, node.out | bit(j));
  }
}

}  // namespace

void enumerate_feasible_masks(
    const arma::uvec& free_cols, arma::uword p,
    const std::vector<IndexPair>& forbidden_pairs,
    const std::function<void(const arma::uvec&)>& visit) {
  if (free_cols.n_elem > 0 && free_cols.max() >= 64)
    throw Exception(ErrorCode::ShapeMismatch,
                    "subset search supports at most 64 columns");
  std::vector<Bits> partners(64, 0);
  for (const auto& [j, k] : forbidden_pairs) {
    partners[j] |= bit(k);
    partners[k] |= bit(j);
  }
  std::vector<arma::uword> chosen;
  chosen.reserve(p);
  auto rec = [&](auto&& self, arma::uword start, Bits blocked) -> void {
    if (chosen.size() == p) {
      visit(arma::uvec(chosen));
      return;
    }
    const arma::uword need = p - static_cast<arma::uword>(chosen.size());
    for (arma::uword t = start; t + need <= free_cols.n_elem; ++t) {
      const arma::uword j = free_cols[t];
      if (blocked & bit(j)) continue;
      chosen.push_back(j);
      self(self, t + 1, blocked | partners[j]);
      chosen.pop_back();
    }
  };
  rec(rec, 0, 0);
}

std::vector<arma::uvec> collect_feasible_masks(
    const arma::uvec& free_cols, arma::uword p,
    const std::vector<IndexPair>& forbidden_pairs) {
  std::vector<arma::uvec> out;
  enumerate_feasible_masks(free_cols, p, forbidden_pairs,
                           [&](const arma::uvec& cols) { out.push_back(cols); });
  return out;
}

MpBetaResult solve_mp_beta(const SpatialDataset& ds, const DistanceMatrix& dm,
                           const BandwidthField& bw, arma::uword p,
                           const std::vector<IndexPair>& forbidden_pairs,
                           const SolverConfig& cfg,
                           const std::optional<SubsetMask>& warm_start) {
  bw.validate();
  const SearchProblem prob = make_problem(ds, p, forbidden_pairs);
  MpBetaEvaluator eval(ds, dm, bw, cfg);

  Candidate incumbent;
  if (warm_start && warm_start->n_vars() == ds.n_vars()) {
    Bits bits = 0;
    for (arma::uword j : warm_start->selected_free_columns()) bits |= bit(j);
    if (static_cast<arma::uword>(std::popcount(bits)) == p &&
        (bits & ~prob.free_bits) == 0 && prob.pair_feasible(bits)) {
      incumbent = Candidate{bits, eval.total_wsse(bits), index_sum_of(bits), true};
    }
  }

  SubsetSearchStats stats;
  bool use_bnb = false;
  switch (cfg.subset_strategy) {
    case SubsetStrategy::exhaustive: use_bnb = false; break;
    case SubsetStrategy::branch_and_bound: use_bnb = true; break;
    case SubsetStrategy::automatic:
      use_bnb = binomial(prob.free_cols.n_elem, p) > 20000.0;
      break;
  }
  if (use_bnb)
    branch_and_bound_search(prob, eval, &incumbent, &stats);
  else
    exhaustive_search(prob, eval, &incumbent, &stats);

  if (!incumbent.valid)
    throw Exception(ErrorCode::InfeasibleCardinality,
                    "forbidden pairs leave no feasible subset of the requested size");

  MpBetaResult result;
  std::vector<arma::uword> sel;
  Bits rest = incumbent.bits;
  while (rest) {
    sel.push_back(static_cast<arma::uword>(std::countr_zero(rest)));
    rest &= rest - 1;
  }
  result.mask = make_subset_mask(ds.n_vars(), arma::uvec(sel), forbidden_pairs,
                                 ds.has_intercept);
  eval.extract(incumbent.bits, &result.beta, &result.errors);
  result.objective = integrated_objective(result.errors, dm, bw);
  result.stats = stats;
  result.ridge_used = eval.ridge_used();
  return result;
}

}  // namespace igwr
