#include "burg/backward_flow.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "burg/errors.hpp"
#include "burg/io.hpp"
#include "burg/stats.hpp"

namespace burg {

namespace {

constexpr int kLawGrid = 4096;

// value at sigma = 0 from the first three interior knots (uniform spacing)
double extrap0(const std::vector<double>& v) { return 3.0 * v[1] - 3.0 * v[2] + v[3]; }

}  // namespace

const SegmentLaw& BranchLaw::seg(int id) const {
  for (const auto& s : segments)
    if (s.segment_id == id) return s;
  fail(Err::config_invalid, "segment not in this law");
}

double BranchLaw::p_side(int segment_id, double tau, int side) const {
  const SegmentLaw& L = seg(segment_id);
  if (tau < L.t_lo || tau > L.t_hi) return 0.0;
  const ShockState st = sol_->shock_state(segment_id, tau);
  const double g = side > 0 ? st.du_plus : st.du_minus;
  const double wing = std::max(0.0, 1.0 - g * (tau - t0));
  return st.jump() * wing / (2.0 * (u_minus_f - u_plus_f) * (tf - t0));
}

double BranchLaw::p_plus(double tau) const {
  double p = 0.0;
  for (const auto& s : segments)
    if (s.alive_at(tau)) p += p_side(s.segment_id, tau, +1);
  return p;
}

double BranchLaw::p_minus(double tau) const {
  double p = 0.0;
  for (const auto& s : segments)
    if (s.alive_at(tau)) p += p_side(s.segment_id, tau, -1);
  return p;
}

double BranchLaw::normalization() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.mass;
  return total;
}

double BranchLaw::on_shock_probability(double t) const {
  if (t >= tf) return 1.0;
  double w = 0.0;
  for (const auto& s : segments)
    if (s.alive_at(t)) w += s.width(std::sqrt(std::max(0.0, t - s.t_lo)));
  return w;
}

double BranchLaw::segment_prob(int id) const { return seg(id).mass; }

double BranchLaw::subtree_prob(int id) const {
  const SegmentLaw& L = seg(id);
  double p = L.mass;
  for (int c : L.children) p += subtree_prob(c);
  return p;
}

int BranchLaw::chain_segment(int id, double t) const {
  const SegmentLaw* cur = &seg(id);
  while (cur->parent >= 0 && t >= cur->t_hi) cur = &seg(cur->parent);
  return cur->segment_id;
}

BranchLaw::Draw BranchLaw::sample(Rng& rng) const {
  const double r = rng.uniform01() * normalization();
  const SegmentLaw* L = &segments.back();
  for (const auto& s : segments)
    if (r < s.cum_start + s.mass) {
      L = &s;
      break;
    }
  Draw d;
  d.seg = L->segment_id;
  double m = std::max(0.0, r - L->cum_start);
  if (m < L->birth_atom) {
    // focusing fan: uniform over the reference positions collapsing at t_lo
    d.tau = L->t_lo;
    d.side = 0;
    d.x_branch = L->x(0.0);
    const double b = L->birth_b_lo + (L->birth_b_hi - L->birth_b_lo) * (m / L->birth_atom);
    d.u_branch = (d.x_branch - b) / (L->t_lo - t0);
    return d;
  }
  if (L->inv_cdf.knots().empty()) {
    // vanishing continuous mass: branch right at the segment start
    d.tau = L->t_lo;
    d.side = rng.uniform01() < L->frac_plus(0.0) ? +1 : -1;
    d.x_branch = L->x(0.0);
    d.u_branch = d.side > 0 ? L->u_plus(0.0) : L->u_minus(0.0);
    return d;
  }
  const double sigma = std::min(L->inv_cdf(m - L->birth_atom), L->sigma_max);
  d.tau = L->t_lo + sigma * sigma;
  d.side = rng.uniform01() < L->frac_plus(sigma) ? +1 : -1;
  d.x_branch = L->x(sigma);
  d.u_branch = d.side > 0 ? L->u_plus(sigma) : L->u_minus(sigma);
  return d;
}

BranchLaw branch_densities(const EntropySolution& sol, int shock_id, double t0,
                           double tf) {
  require(tf > sol.t0(), Err::config_invalid, "tf must lie after the data time");
  const ShockTree& tree = sol.shock_tree(tf);
  require(shock_id >= 0 && shock_id < (int)tree.segments.size(), Err::config_invalid,
          "unknown segment id");
  require(tree.seg(shock_id).alive_at(tf, tree.horizon), Err::config_invalid,
          "segment not alive at tf");

  auto members = tree.subtree(shock_id);
  double t_star = tree.seg(members.front()).t_form;
  for (int id : members) t_star = std::min(t_star, tree.seg(id).t_form);
  require(t0 >= sol.t0(), Err::config_invalid, "reference time precedes the data");
  // reference positions must predate every shock of this tree; a shock already
  // present in the data pins t0 to the data time itself
  require(t0 < t_star || (t0 == t_star && t_star == sol.t0()), Err::t0_too_late,
          "reference time is not before the tree's first formation");

  BranchLaw law;
  law.sol_ = &sol;
  law.shock_id = shock_id;
  law.t0 = t0;
  law.tf = tf;
  law.t_star = t_star;

  const ShockState rs = sol.shock_state(shock_id, tf);
  law.x_f = rs.x;
  law.u_minus_f = rs.u_minus;
  law.u_plus_f = rs.u_plus;
  law.width_f = (rs.u_minus - rs.u_plus) * (tf - t0);
  const double W = law.width_f;

  const auto& u0 = sol.data();
  const double ts0 = sol.t0();
  auto bmap = [&](double a) { return a + u0.u(a) * (t0 - ts0); };

  // children must be tabulated before their parent needs their end widths
  std::sort(members.begin(), members.end(), [&](int a, int b) {
    const auto &sa = tree.seg(a), &sb = tree.seg(b);
    const double ha = sa.parent >= 0 ? sa.t_end : tf;
    const double hb = sb.parent >= 0 ? sb.t_end : tf;
    return ha < hb || (ha == hb && a < b);
  });

  for (int id : members) {
    const ShockSegment& ts = tree.seg(id);
    SegmentLaw L;
    L.segment_id = id;
    L.parent = id == shock_id ? -1 : ts.parent;
    L.t_lo = ts.t_form;
    L.t_hi = L.parent >= 0 ? ts.t_end : tf;
    // merged segments end in a degenerate equal-minima problem; stop a hair early
    const double t_cap =
        L.parent >= 0 ? L.t_hi - 1e-11 * std::max(1.0, std::abs(L.t_hi)) : L.t_hi;
    L.sigma_max = std::sqrt(t_cap - L.t_lo);

    std::vector<double> sg(kLawGrid), xs(kLawGrid), um(kLawGrid), up(kLawGrid),
        wd(kLawGrid), bl(kLawGrid), fr(kLawGrid);
    for (int i = 1; i < kLawGrid; ++i) {
      sg[i] = L.sigma_max * i / (kLawGrid - 1);
      // pin the last knot to t_cap itself so evaluations at sigma_max reproduce
      // the end state bit for bit
      const double tau = i == kLawGrid - 1 ? t_cap : L.t_lo + sg[i] * sg[i];
      const ShockState st = sol.shock_state(id, tau);
      xs[i] = st.x;
      um[i] = st.u_minus;
      up[i] = st.u_plus;
      bl[i] = bmap(st.a_minus);
      wd[i] = (bmap(st.a_plus) - bmap(st.a_minus)) / W;
      const double wp = std::max(0.0, 1.0 - st.du_plus * (tau - t0));
      const double wm = std::max(0.0, 1.0 - st.du_minus * (tau - t0));
      fr[i] = wp + wm > 0.0 ? wp / (wp + wm) : 0.5;
    }
    sg[0] = 0.0;
    xs[0] = extrap0(xs);
    um[0] = extrap0(um);
    up[0] = extrap0(up);
    bl[0] = extrap0(bl);
    fr[0] = std::clamp(extrap0(fr), 0.0, 1.0);
    if (ts.born_at_merger) {
      double w0 = 0.0;
      for (int c : {ts.child_left, ts.child_right})
        if (c >= 0) {
          const SegmentLaw& cl = law.seg(c);
          w0 += cl.width(cl.sigma_max);
          L.children.push_back(c);
        }
      wd[0] = w0;
    } else if (ts.focusing_atom) {
      wd[0] = std::max(0.0, extrap0(wd));
      L.birth_atom = wd[0];
      L.birth_b_lo = bl[0];
      L.birth_b_hi = bl[0] + wd[0] * W;
    } else {
      wd[0] = 0.0;
    }
    L.mass = L.birth_atom + (wd.back() - wd[0]);

    L.x = Pchip(sg, xs);
    L.u_minus = Pchip(sg, um);
    L.u_plus = Pchip(sg, up);
    L.width = Pchip(sg, wd);
    L.b_lo = Pchip(sg, bl);
    L.frac_plus = Pchip(sg, fr);
    // inverse of the continuous cumulative; knots thinned to stay increasing
    std::vector<double> ci, si;
    for (int i = 0; i < kLawGrid; ++i) {
      const double c = wd[i] - wd[0];
      if (ci.empty() || c > ci.back() + 1e-15) {
        ci.push_back(c);
        si.push_back(sg[i]);
      }
    }
    if (ci.size() >= 2) L.inv_cdf = Pchip(ci, si);
    law.segments.push_back(std::move(L));
  }

  // branch probabilities at each merger from the children's end states
  for (auto& L : law.segments) {
    if (L.children.empty()) continue;
    double wsum = 0.0;
    for (int c : L.children) wsum += law.seg(c).width(law.seg(c).sigma_max);
    for (int c : L.children) {
      const SegmentLaw& cl = law.seg(c);
      L.child_prob.push_back(cl.width(cl.sigma_max) / wsum);
      L.child_u_star.push_back(
          0.5 * (cl.u_minus(cl.sigma_max) + cl.u_plus(cl.sigma_max)));
    }
  }

  std::sort(law.segments.begin(), law.segments.end(),
            [](const SegmentLaw& a, const SegmentLaw& b) {
              return a.segment_id < b.segment_id;
            });
  double cum = 0.0;
  for (auto& L : law.segments) {
    L.cum_start = cum;
    cum += L.mass;
  }
  return law;
}

std::pair<double, double> jump_rates(const BranchLaw& law, double tau) {
  require(tau > law.t_star && tau <= law.tf, Err::out_of_support,
          "tau outside (t_star, tf]");
  const double P = law.on_shock_probability(tau);
  return {law.p_plus(tau) / P, law.p_minus(tau) / P};
}

double atom_mass(const BranchLaw& law, double t) {
  if (t <= law.t_star) return 0.0;
  return law.on_shock_probability(t);
}

PathEnsemble sample_paths(BranchLaw law, std::size_t n, std::uint64_t seed, int jobs) {
  require(n >= 1, Err::config_invalid, "need at least one path");
  std::vector<BackwardPath> paths(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    Rng rng = Rng::for_stream(seed, i);
    const auto d = law.sample(rng);
    paths[i] = {d.tau, d.side, d.seg, d.x_branch, d.u_branch};
  });
  return PathEnsemble(std::move(law), std::move(paths));
}

PathEnsemble sample_limiting_paths(BranchLaw law, std::size_t n, std::uint64_t seed) {
  require(n >= 1, Err::config_invalid, "need at least one path");
  std::vector<BackwardPath> paths(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::for_stream(seed, i);
    const int side = rng.uniform01() < 0.5 ? -1 : +1;
    paths[i] = {law.tf, side, law.shock_id, law.x_f,
                side > 0 ? law.u_plus_f : law.u_minus_f};
  }
  return PathEnsemble(std::move(law), std::move(paths));
}

double PathEnsemble::x_at(std::size_t i, double t) const {
  const BackwardPath& p = paths_[i];
  if (t < p.tau) return p.x_branch + p.u_branch * (t - p.tau);
  const SegmentLaw& L = law_.seg(law_.chain_segment(p.seg, t));
  return L.x(std::sqrt(std::max(0.0, t - L.t_lo)));
}

double PathEnsemble::xdot_at(std::size_t i, double t) const {
  const BackwardPath& p = paths_[i];
  if (t < p.tau) return p.u_branch;
  const SegmentLaw& L = law_.seg(law_.chain_segment(p.seg, t));
  const double sg = std::sqrt(std::max(0.0, t - L.t_lo));
  return 0.5 * (L.u_minus(sg) + L.u_plus(sg));
}

FlowLabel PathEnsemble::label_at(std::size_t i, double t) const {
  const BackwardPath& p = paths_[i];
  if (t >= p.tau) return FlowLabel::on_shock;
  if (p.side > 0) return FlowLabel::right;
  if (p.side < 0) return FlowLabel::left;
  return FlowLabel::downward;
}

std::string PathEnsemble::to_csv(const std::vector<double>& times) const {
  Csv csv({"path_id", "tau", "side", "t", "x", "label"});
  for (std::size_t i = 0; i < paths_.size(); ++i)
    for (double t : times) {
      csv.cell((std::int64_t)i)
          .cell(paths_[i].tau)
          .cell((std::int64_t)paths_[i].side)
          .cell(t)
          .cell(x_at(i, t))
          .cell((std::int64_t)label_at(i, t));
      csv.end_row();
    }
  return csv.body();
}

MartingaleReport verify_martingale(const PathEnsemble& ens,
                                   const std::vector<double>& times,
                                   std::optional<double> conditioning) {
  MartingaleReport rep;
  rep.u_star_f = ens.law().u_star_f();
  const std::size_t n = ens.size();
  std::vector<double> v(n);

  for (double t : times) {
    for (std::size_t i = 0; i < n; ++i) v[i] = ens.xdot_at(i, t);
    const MeanErr me = mean_sem(v);
    MartingaleCheck c;
    c.t = t;
    c.mean = me.mean;
    c.sem = me.sem;
    c.target = rep.u_star_f;
    const double dev = std::abs(me.mean - rep.u_star_f);
    c.pass = me.sem > 0.0 ? dev <= 3.0 * me.sem : dev == 0.0;
    if (me.sem > 0.0) rep.max_dev_over_sem = std::max(rep.max_dev_over_sem, dev / me.sem);
    rep.pass = rep.pass && c.pass;
    rep.unconditional.push_back(c);
  }

  if (conditioning) {
    const double s = *conditioning;
    rep.conditioning_time = s;
    std::vector<double> key(n);
    for (std::size_t i = 0; i < n; ++i) key[i] = ens.xdot_at(i, s);
    const auto bins = condition_bins(key, 30);
    std::size_t binned = 0;
    for (const auto& b : bins) binned += b.size();
    rep.unbinned = n - binned;
    for (double t : times) {
      if (t > s) continue;
      ConditionalSlice slice;
      slice.t = t;
      for (const auto& idx : bins) {
        std::vector<double> diff(idx.size()), k(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j) {
          diff[j] = ens.xdot_at(idx[j], t) - key[idx[j]];
          k[j] = key[idx[j]];
        }
        const MeanErr md = mean_sem(diff);
        ConditionalBin cb;
        cb.key = mean_sem(k).mean;
        cb.n = idx.size();
        cb.mean_diff = md.mean;
        cb.sem = md.sem;
        cb.pass = md.sem > 0.0 ? std::abs(md.mean) <= 3.0 * md.sem : md.mean == 0.0;
        if (md.sem > 0.0)
          rep.max_dev_over_sem =
              std::max(rep.max_dev_over_sem, std::abs(md.mean) / md.sem);
        rep.pass = rep.pass && cb.pass;
        slice.bins.push_back(cb);
      }
      rep.conditional.push_back(std::move(slice));
    }
  }
  return rep;
}

std::string MartingaleReport::to_json() const {
  nlohmann::json j;
  j["u_star_f"] = u_star_f;
  j["pass"] = pass;
  j["max_dev_over_sem"] = max_dev_over_sem;
  j["unconditional"] = nlohmann::json::array();
  for (const auto& c : unconditional)
    j["unconditional"].push_back(
        {{"t", c.t}, {"mean", c.mean}, {"sem", c.sem}, {"target", c.target}, {"pass", c.pass}});
  if (conditioning_time) {
    j["conditioning_time"] = *conditioning_time;
    j["unbinned"] = unbinned;
    j["conditional"] = nlohmann::json::array();
    for (const auto& s : conditional) {
      nlohmann::json js;
      js["t"] = s.t;
      js["bins"] = nlohmann::json::array();
      for (const auto& b : s.bins)
        js["bins"].push_back({{"key", b.key},
                              {"n", b.n},
                              {"mean_diff", b.mean_diff},
                              {"sem", b.sem},
                              {"pass", b.pass}});
      j["conditional"].push_back(js);
    }
  }
  return j.dump(2);
}

}  // namespace burg
