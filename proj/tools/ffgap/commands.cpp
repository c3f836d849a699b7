#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "ffgap/certification.hpp"
#include "ffgap/detectability.hpp"
#include "ffgap/io.hpp"
#include "ffgap/models.hpp"
#include "ffgap/operators.hpp"
#include "ffgap/projector_cache.hpp"

namespace ffgap::cli {
namespace {

struct Instance {
  EmbeddedGraph graph;
  Interaction phi;
  Region region;
  std::size_t resamples = 0;
};

Interaction model_on(const RunConfig& cfg, const EmbeddedGraph& g, std::size_t& resamples) {
  resamples = 0;
  if (cfg.model == "heisenberg_fm") return heisenberg_fm(g);
  if (cfg.model == "aklt") return aklt(g);
  if (cfg.model == "commuting_toy") {
    if (cfg.toy == "exclusion") return commuting_toy(g, ToyVariant::kExclusion);
    if (cfg.toy == "polarizing") return commuting_toy(g, ToyVariant::kPolarizing);
    fail(ErrorCode::kConfig, "unknown toy variant '" + cfg.toy + "'");
  }
  if (cfg.model == "low_rank") {
    auto inst = random_low_rank(g, 2, cfg.rank, cfg.seed, cfg.resample_budget);
    resamples = inst.resamples;
    return std::move(inst.phi);
  }
  fail(ErrorCode::kConfig, "unknown model '" + cfg.model + "'");
}

// Graph files are checked against their stored embedding constant; generators are correct by construction.
EmbeddedGraph geometry_of(const RunConfig& cfg, const std::vector<std::size_t>& extents, bool checked = true) {
  if (!cfg.graph_file.empty()) {
    EmbeddedGraph g = graph_from_json(read_text_file(cfg.graph_file));
    if (checked) {
      const auto report = check_embedding(g);
      if (!report.valid) fail(ErrorCode::kUnreachable, report.message);
      if (!report.stored_constant_holds)
        fail(ErrorCode::kInvalidArgument, "stored C_gamma " + format_double(g.c_gamma()) + " is below the fitted " +
                                              format_double(report.fitted_c_gamma));
    }
    return g;
  }
  ModelSpec spec;
  spec.geometry = cfg.geometry;
  spec.extents = extents;
  return make_geometry(spec);
}

Instance load(const RunConfig& cfg, const std::vector<std::size_t>& extents) {
  EmbeddedGraph g = geometry_of(cfg, extents);
  std::size_t resamples = 0;
  Interaction phi = cfg.interaction_file.empty() ? model_on(cfg, g, resamples)
                                                 : interaction_from_json(read_text_file(cfg.interaction_file));
  validate(phi, g);
  Region region = g.all_vertices();
  if (!cfg.region.empty()) {
    for (auto v : cfg.region)
      if (v >= g.num_vertices()) fail(ErrorCode::kConfig, "region vertex " + std::to_string(v) + " is not in the graph");
    region = Region(std::vector<VertexId>(cfg.region.begin(), cfg.region.end()));
  }
  return {std::move(g), std::move(phi), std::move(region), resamples};
}

Instance load(const RunConfig& cfg) { return load(cfg, cfg.extents); }

unsigned threads_of(const RunConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

SolverOptions solver_of(const RunConfig& cfg) {
  SolverOptions s;
  s.caps.dense_max = cfg.dense_max;
  s.caps.sparse_max = cfg.sparse_max;
  s.krylov.tolerance = cfg.tolerance;
  s.krylov.seed = cfg.seed;
  s.num_eigs = cfg.num_eigs;
  return s;
}

NormOptions norms_of(const RunConfig& cfg) {
  NormOptions n;
  n.seed = cfg.seed;
  return n;
}

// CSV is buffered and written in one go so a failed run leaves no partial file.
class Output {
 public:
  explicit Output(const RunConfig& cfg) : cfg_(cfg) {}

  std::ostream& csv() { return csv_; }
  std::ostream& report() {
    if (cfg_.quiet) return null_;
    return cfg_.csv.empty() ? std::cerr : std::cout;
  }
  void flush() {
    if (cfg_.csv.empty()) {
      std::cout << csv_.str();
      std::cout.flush();
    } else {
      write_text_file(cfg_.csv, csv_.str());
    }
  }

 private:
  const RunConfig& cfg_;
  std::ostringstream csv_;
  std::ostream null_{nullptr};
};

std::optional<ProjectorCache>& cache_slot() {
  static std::optional<ProjectorCache> cache = ProjectorCache::from_environment();
  return cache;
}

ProjectorCache* cache() {
  auto& c = cache_slot();
  return c ? &*c : nullptr;
}

std::string fmt(double x) { return format_double(x); }

std::pair<std::vector<double>, std::vector<double>> window_of(const RunConfig& cfg, const EmbeddedGraph& g) {
  if (!cfg.window.empty()) {
    auto w = parse_window(cfg.window);
    if (static_cast<int>(w.first.size()) != g.dimension())
      fail(ErrorCode::kConfig, "window dimension does not match the graph");
    return w;
  }
  const int dim = g.dimension();
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    for (int a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], g.coordinate(v, a));
      hi[a] = std::max(hi[a], g.coordinate(v, a));
    }
  return {lo, hi};
}

}  // namespace

int cmd_gap(const RunConfig& cfg) {
  const Instance inst = load(cfg);
  const auto spec = region_spectrum(inst.phi, inst.region, cfg.projector_form, solver_of(cfg), cache());
  Output out(cfg);
  auto& r = out.report();
  r << "model        " << cfg.model << "\n"
    << "region       " << inst.region.to_string() << "\n"
    << "sites        " << inst.region.size() << "\n"
    << "dimension    " << spec.dim << "\n"
    << "kernel dim   " << spec.kernel_dim << "\n"
    << "gap          " << (spec.gap ? fmt(*spec.gap) : std::string("none")) << "\n"
    << "solver       " << spec.solver << " (max residual " << fmt(spec.max_residual) << ")\n";
  CsvWriter w(out.csv(), {"model", "region_size", "hilbert_dim", "kernel_dim", "gap", "max_residual", "solver"});
  w.cell(cfg.model).cell(static_cast<long long>(inst.region.size())).cell(static_cast<long long>(spec.dim));
  w.cell(static_cast<long long>(spec.kernel_dim));
  if (spec.gap)
    w.cell(*spec.gap);
  else
    w.empty();
  w.cell(spec.max_residual).cell(spec.solver);
  w.end_row();
  out.flush();
  if (!spec.gap) {
    r << "no eigenvalue above the ground level\n";
    return kExitGapless;
  }
  return kExitOk;
}

int cmd_dl_check(const RunConfig& cfg) {
  const Instance inst = load(cfg);
  const auto& g = inst.graph;
  const double c_gamma = g.c_gamma();
  const double range = inst.phi.range();
  const double threshold = coarse_graining_threshold(g, inst.phi);
  if (cfg.t < threshold)
    fail(ErrorCode::kConfig, "t = " + fmt(cfg.t) + " is below max(2, C R) = " + fmt(threshold));

  const Interaction local = inst.phi.restricted_to(inst.region);
  const auto coloring = layer_coloring(local);
  const int layers = coloring.num_layers;
  const auto mode = cfg.g_mode == "overlap" ? CommutationMode::kSupportOverlap : CommutationMode::kCommutator;
  const int g_deg = commutation_degree(local, mode).g;

  ColumnOptions columns;
  columns.threads = threads_of(cfg);
  columns.cache = cache();
  columns.caps = solver_of(cfg).caps;
  const NormOptions norms = norms_of(cfg);

  double lambda;
  if (cfg.lambda) {
    lambda = *cfg.lambda;
  } else {
    const auto spec = region_spectrum(inst.phi, inst.region, true, solver_of(cfg), cache());
    if (!spec.gap) fail(ErrorCode::kGaplessAtFiniteSize, "region spectrum has nothing above the ground level");
    lambda = *spec.gap;
  }

  const auto kernel = ground_space(inst.phi, inst.region, cache(), columns.caps);
  const auto decomp = column_decomposition(inst.phi, g, inst.region, cfg.t, cfg.alpha, columns);
  const auto dl = dl_operator(decomp);
  const auto perp = complement_map(kernel, dl.host);
  const auto t_prod = layer_product(inst.phi, inst.region, coloring);

  Output out(cfg);
  auto& r = out.report();
  CsvWriter w(out.csv(), {"check", "instance", "lhs", "mid", "rhs", "status"});
  bool all_pass = true;
  auto row = [&](const std::string& check, const std::string& instance, std::optional<double> lhs,
                 std::optional<double> mid, std::optional<double> rhs, const std::string& status) {
    if (status == "fail") all_pass = false;
    w.cell(check).cell(instance);
    for (const auto& v : {lhs, mid, rhs})
      if (v)
        w.cell(*v);
      else
        w.empty();
    w.cell(status);
    w.end_row();
    r << "  " << check << " [" << instance << "]";
    if (lhs) r << " lhs=" << fmt(*lhs);
    if (mid) r << " mid=" << fmt(*mid);
    if (rhs) r << " rhs=" << fmt(*rhs);
    r << "  " << status << "\n";
  };
  auto verdict = [](bool ok) { return std::string(ok ? "pass" : "fail"); };

  r << "instance: " << cfg.model << " on " << inst.region.size() << " sites, t=" << fmt(cfg.t)
    << ", alpha=" << cfg.alpha << "\n"
    << "  C=" << fmt(c_gamma) << " R=" << fmt(range) << " L=" << layers << " g=" << g_deg << " (" << cfg.g_mode
    << ") lambda=" << fmt(lambda) << " kernel=" << kernel.rank() << "\n"
    << "  columns: " << decomp.even.size() << " even, " << decomp.odd.size() << " odd, " << decomp.pruned
    << " pruned\n";

  const auto comm = check_commuting(decomp, norms);
  const double comm_max = std::max(comm.max_even, comm.max_odd);
  row("commuting", std::to_string(comm.pairs) + " pairs", comm_max, std::nullopt, 1e-12, verdict(comm_max <= 1e-12));

  const double dl_norm = estimate_norm(dl.map, norms).value;
  row("dl_norm", "||DL||", dl_norm, std::nullopt, 1.0, verdict(dl_norm <= 1.0 + 1e-9));
  const double dl_perp = estimate_norm(dl.map * perp, norms).value;

  const auto standard = standard_dl_check(t_prod, perp, lambda, g_deg, norms);
  row("standard_dl", standard.g_flagged ? "g=0 flagged, 1 used" : "g=" + std::to_string(standard.g_used),
      standard.norm_sq, std::nullopt, standard.bound, verdict(standard.holds));
  const double tp = std::sqrt(std::max(standard.norm_sq, 0.0));

  if (layers < 2) {
    row("smuggle", "single layer", std::nullopt, std::nullopt, std::nullopt, "inactive");
    row("refined_dl", "single layer", dl_perp, std::nullopt, std::nullopt, "inactive");
  } else {
    const int budget = smuggling_degree_budget(cfg.t, c_gamma, layers, range);
    const int safe = safe_smuggling_degree_budget(cfg.t, c_gamma, layers, range);
    if (budget != safe)
      row("smuggle_budget", "printed " + std::to_string(budget) + ", usable " + std::to_string(safe), std::nullopt,
          std::nullopt, std::nullopt, "info");
    if (safe < 1) {
      row("smuggle", "degree budget " + std::to_string(safe), std::nullopt, std::nullopt, std::nullopt, "inactive");
    } else {
      const std::vector<std::pair<std::string, SmuggledPolynomial>> polys = {
          {"F=1", SmuggledPolynomial::coefficients({1.0})},
          {"F=1-x", SmuggledPolynomial::coefficients({1.0, -1.0})},
          {"F=step(q=" + std::to_string(safe) + ",gamma=0.4)", SmuggledPolynomial::step({safe, 0.4})},
      };
      for (const auto& [name, f] : polys) {
        const auto s = smuggle_check(dl, t_prod, f, c_gamma, layers, range, norms);
        row("smuggle", name, s.residual, std::nullopt, 1e-8, verdict(s.residual <= 1e-8));
      }
      const ChebyshevStep step{safe, 0.3};
      const double bound = f_sup([&](double x) { return chebyshev_step(step, x); }, tp * tp);
      row("corollary", "step(q=" + std::to_string(safe) + ",gamma=0.3)", dl_perp, std::nullopt, bound,
          verdict(dl_perp <= bound + 1e-9));
    }
    const double refined = refined_dl_bound(cfg.t, lambda, layers, g_deg, c_gamma, range);
    if (refined < 1.0)
      row("refined_dl", "||DL P_perp||", dl_perp, std::nullopt, refined, verdict(dl_perp <= refined + 1e-9));
    else
      row("refined_dl", "bound >= 1", dl_perp, std::nullopt, refined, "inactive");
  }

  std::vector<SplitPair> pairs;
  try {
    pairs = split_pairs(inst.region, cfg.k_min, 1, g);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientWidth && e.code() != ErrorCode::kUnsupportedRegion) throw;
    row("overlap", std::string("no split: ") + to_string(e.code()), std::nullopt, std::nullopt, std::nullopt,
        "inactive");
  }
  const OverlapInputs inputs{cfg.t, lambda, layers, std::max(g_deg, 0)};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto o = overlap_bound_check(inst.phi, g, pairs[i], inputs, columns, norms);
    const std::string name = "|A|=" + std::to_string(pairs[i].a.size()) + " |B|=" + std::to_string(pairs[i].b.size()) +
                             (o.admissible ? " admissible" : "") + (o.bound_active ? " bound active" : "");
    row("overlap", name, o.lhs, o.mid, o.rhs, verdict(o.holds));
  }

  out.flush();
  r << (all_pass ? "all checks passed\n" : "one or more checks FAILED\n");
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_certify(const RunConfig& cfg) {
  if (cfg.k_max < cfg.k_min)
    throw UsageError("empty k range: k_max " + std::to_string(cfg.k_max) + " < k_min " + std::to_string(cfg.k_min));
  const Instance inst = load(cfg);
  const auto& g = inst.graph;
  const auto [lo, hi] = window_of(cfg, g);
  const SRule rule = parse_s_rule(cfg.s_rule, g.dimension());

  LevelOptions opts;
  opts.solver = solver_of(cfg);
  opts.delta.max_pairs = cfg.max_pairs;
  opts.delta.seed = cfg.seed;
  opts.delta.threads = threads_of(cfg);
  opts.delta.cache = cache();
  opts.delta.caps = opts.solver.caps;
  opts.delta.norms = norms_of(cfg);

  GapSequence seq;
  std::vector<LevelRow> rows;
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    auto row = measure_level(inst.phi, g, k, rule, lo, hi, opts);
    if (!row.gap)
      fail(ErrorCode::kInsufficientData, "level k=" + std::to_string(k) + " has no gapped family member in the window");
    seq.k.push_back(k);
    seq.l.push_back(row.l);
    seq.lambda.push_back(*row.gap);
    seq.s.push_back(row.s);
    // no realisable split: take the trivial bound delta = 1
    seq.delta.push_back(row.delta.delta ? *row.delta.delta : 1.0);
    rows.push_back(std::move(row));
  }
  CertifyOptions copts;
  copts.tail = cfg.tail;
  copts.s_rule = rule;
  const auto cert = certify(seq, phi_bounds(inst.phi).min, cfg.k_max, copts);

  Output out(cfg);
  auto& r = out.report();
  CsvWriter w(out.csv(),
              {"k", "l_k", "region_size", "hilbert_dim", "gap", "delta_k", "factor", "running_lower_bound"});
  r << "model " << cfg.model << ", s rule " << rule.describe() << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    w.cell(static_cast<long long>(row.k)).cell(row.l).cell(static_cast<long long>(row.region_size));
    w.cell(static_cast<long long>(row.hilbert_dim)).cell(*row.gap);
    if (row.delta.delta)
      w.cell(*row.delta.delta);
    else
      w.empty();
    const int offset = row.k - cert.k0;
    if (offset >= 0 && offset < static_cast<int>(cert.factors.size()))
      w.cell(cert.factors[offset]).cell(cert.running[offset]);
    else
      w.empty().empty();
    w.end_row();
    r << "  k=" << row.k << " l=" << fmt(row.l) << " |Y|=" << row.region_size << " gap=" << fmt(*row.gap)
      << " s=" << fmt(row.s) << " delta="
      << (row.delta.delta ? fmt(*row.delta.delta) : std::string("n/a (no split)")) << " pairs "
      << row.delta.pairs_tested << "/" << row.delta.pairs_total << (row.delta.sampled ? " sampled" : "") << "\n";
  }
  if (cert.certifiable) {
    r << "certifiable: lower bound " << fmt(cert.lower_bound) << "\n"
      << "  k0=" << cert.k0 << " finite bound " << fmt(cert.finite_lower_bound) << " tail estimate "
      << fmt(cert.tail_estimate) << " root ratio " << fmt(cert.root_ratio) << "\n";
  } else {
    r << "not certifiable: " << cert.reason << "\n";
  }
  out.flush();
  return kExitOk;
}

int cmd_scaling(const RunConfig& cfg) {
  const auto sizes = parse_sizes(cfg.sizes);
  if (sizes.size() < 2) fail(ErrorCode::kInsufficientData, "scaling needs at least two sizes");
  Output out(cfg);
  auto& r = out.report();
  CsvWriter w(out.csv(), {"size", "region_size", "hilbert_dim", "gap", "spin_wave_bound"});
  std::vector<double> xs, gaps;
  for (int n : sizes) {
    if (n < 1) fail(ErrorCode::kConfig, "sizes must be positive");
    std::vector<std::size_t> extents;
    if (cfg.geometry == "chain")
      extents = {static_cast<std::size_t>(n)};
    else if (cfg.geometry == "honeycomb")
      extents = {static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
    else
      extents.assign(std::max<std::size_t>(cfg.extents.size(), 1), static_cast<std::size_t>(n));
    RunConfig sized = cfg;
    sized.region.clear();
    const Instance inst = load(sized, extents);
    const auto spec = region_spectrum(inst.phi, inst.region, cfg.projector_form, solver_of(cfg), cache());
    if (!spec.gap) fail(ErrorCode::kGaplessAtFiniteSize, "no gap at size " + std::to_string(n));
    xs.push_back(n);
    gaps.push_back(*spec.gap);
    w.cell(static_cast<long long>(n)).cell(static_cast<long long>(inst.region.size()));
    w.cell(static_cast<long long>(spec.dim)).cell(*spec.gap);
    const bool spin_wave = cfg.model == "heisenberg_fm" && cfg.geometry == "chain" && cfg.graph_file.empty();
    if (spin_wave)
      w.cell(spin_wave_upper_bound(n));
    else
      w.empty();
    w.end_row();
    r << "  size " << n << ": gap " << fmt(*spec.gap) << "\n";
  }
  const auto fit = scaling_fit(xs, gaps);
  r << "exponent " << fmt(fit.exponent) << " (r^2 " << fmt(fit.r_squared) << "), min gap " << fmt(fit.min_gap)
    << ", classification: " << to_string(fit.classification) << "\n";
  out.flush();
  return kExitOk;
}

int cmd_coloring(const RunConfig& cfg) {
  const Instance inst = load(cfg);
  const Interaction local = inst.phi.restricted_to(inst.region);
  const auto coloring = layer_coloring(local);
  const auto exact = commutation_degree(local, CommutationMode::kCommutator);
  const auto overlap = commutation_degree(local, CommutationMode::kSupportOverlap);
  Output out(cfg);
  auto& r = out.report();
  r << "terms " << local.size() << ", layers L=" << coloring.num_layers << ", g=" << exact.g
    << " (support overlap " << overlap.g << "), hypergraph degree " << hypergraph_degree(local) << "\n";
  CsvWriter w(out.csv(), {"term", "support", "layer", "noncommuting_neighbours", "overlapping_neighbours"});
  for (std::size_t i = 0; i < local.size(); ++i) {
    std::string support;
    for (auto v : local.terms()[i].support) support += (support.empty() ? "" : " ") + std::to_string(v);
    w.cell(static_cast<long long>(i)).cell(support).cell(static_cast<long long>(coloring.layer_of_term[i] + 1));
    w.cell(static_cast<long long>(exact.per_term[i])).cell(static_cast<long long>(overlap.per_term[i]));
    w.end_row();
  }
  out.flush();
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg) {
  EmbeddedGraph g = geometry_of(cfg, cfg.extents, false);
  Output out(cfg);
  auto& r = out.report();
  CsvWriter w(out.csv(), {"check", "value", "status", "message"});
  bool ok = true;
  auto row = [&](const std::string& check, std::optional<double> value, bool pass, const std::string& msg) {
    ok = ok && pass;
    w.cell(check);
    if (value)
      w.cell(*value);
    else
      w.empty();
    w.cell(std::string(pass ? "pass" : "fail")).cell(msg);
    w.end_row();
    r << "  " << check << ": " << (pass ? "pass" : "FAIL");
    if (value) r << " (" << fmt(*value) << ")";
    if (!msg.empty()) r << " " << msg;
    r << "\n";
  };

  const auto emb = check_embedding(g);
  row("embedding", emb.fitted_c_gamma, emb.valid && emb.stored_constant_holds, emb.message);

  std::size_t resamples = 0;
  std::optional<Interaction> phi;
  try {
    phi = cfg.interaction_file.empty() ? model_on(cfg, g, resamples)
                                       : interaction_from_json(read_text_file(cfg.interaction_file));
    validate(*phi, g);
    row("interaction", static_cast<double>(phi->size()), true, "");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo || e.code() == ErrorCode::kParse || e.code() == ErrorCode::kConfig) throw;
    row("interaction", std::nullopt, false, e.what());
  }
  if (phi && ok) {
    const auto b = phi_bounds(*phi);
    row("phi_min", b.min, b.min > 0.0, "");
    row("phi_max", b.max, true, "");
    row("threshold", coarse_graining_threshold(g, *phi), true, "max(2, C R)");
    Region region = g.all_vertices();
    if (!cfg.region.empty()) region = Region(std::vector<VertexId>(cfg.region.begin(), cfg.region.end()));
    const auto h = hamiltonian(*phi, region, false, solver_of(cfg).caps);
    const bool ff = check_frustration_free(h, solver_of(cfg));
    row("frustration_free", std::nullopt, ff, "");
    if (resamples > 0) row("resamples", static_cast<double>(resamples), true, "");
  }
  out.flush();
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace ffgap::cli
