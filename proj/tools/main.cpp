#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "intlog/engines.hpp"
#include "intlog/io.hpp"
#include "intlog/lattice.hpp"
#include "intlog/structure.hpp"

namespace {

using namespace intlog;

struct Config {
  double epsilon = 0.0;
  double tol = kDefaultTol;
  unsigned long long seed = 0;  // accepted for reproducibility parity with the test suites
  int max_points = 200;
};

void add_common_flags(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--epsilon", cfg.epsilon, "approximation slack for checks and constructions")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--tol", cfg.tol, "numerical tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg.seed, "seed echoed for randomized harnesses");
  cmd->add_option("--max-points", cfg.max_points, "largest accepted point count")
      ->check(CLI::PositiveNumber);
}

[[noreturn]] void input_error(const std::string& message) {
  throw CLI::ValidationError("input", message);
}

double parse_number(const std::string& token, const std::string& what) {
  if (token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    input_error("expected a number for " + what + ", got '" + token + "'");
  return value;
}

std::vector<double> parse_number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    std::size_t b = token.find_first_not_of(" \t");
    std::size_t e = token.find_last_not_of(" \t");
    if (b == std::string::npos) input_error("empty entry in " + what);
    out.push_back(parse_number(token.substr(b, e - b + 1), what));
  }
  if (out.empty()) input_error(what + " must list at least one number");
  return out;
}

Interval parse_interval(const std::string& text) {
  if (text.size() < 3) input_error("interval too short: '" + text + "'");
  char open = text.front();
  char close = text.back();
  std::string inner = text.substr(1, text.size() - 2);
  if (open == '{' && close == '}') return Interval::point(parse_number(inner, "interval point"));
  if ((open != '(' && open != '[') || (close != ')' && close != ']'))
    input_error("interval must look like (a,b), [a,b] or {a}: '" + text + "'");
  std::size_t comma = inner.find(',');
  if (comma == std::string::npos) input_error("interval needs two endpoints: '" + text + "'");
  double lo = parse_number(inner.substr(0, comma), "interval endpoint");
  double hi = parse_number(inner.substr(comma + 1), "interval endpoint");
  Interval iv;
  iv.lo = lo;
  iv.hi = hi;
  iv.lo_closed = open == '[';
  iv.hi_closed = close == ']';
  if (std::isinf(lo) && iv.lo_closed) input_error("infinite endpoints must be open");
  if (std::isinf(hi) && iv.hi_closed) input_error("infinite endpoints must be open");
  return iv;
}

Subset parse_mask(const std::string& text, std::size_t n) {
  if (text.size() != n)
    input_error("mask '" + text + "' must have one 0/1 digit per point (" + std::to_string(n) +
                ")");
  Subset mask = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (text[i] == '1')
      mask |= Subset{1} << i;
    else if (text[i] != '0')
      input_error("mask digits must be 0 or 1: '" + text + "'");
  }
  return mask;
}

std::string mask_text(Subset mask, std::size_t n) {
  std::string out(n, '0');
  for (std::size_t i = 0; i < n; ++i)
    if (mask & (Subset{1} << i)) out[i] = '1';
  return out;
}

std::string values_text(const LatticeFn& f) {
  std::string out;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (i) out += ' ';
    out += format_real(f.values[i]);
  }
  return out;
}

std::vector<long long> dyadic_samples(long long last) {
  std::vector<long long> out;
  for (long long v = 1; v < last; v *= 2) out.push_back(v);
  out.push_back(last);
  return out;
}

// ----- check -----

int run_check(const Config& cfg, const std::string& structure_path,
              const std::string& theory_path) {
  InterpretedStructure structure = load_structure(structure_path, cfg.tol);
  if (structure.space.size() > cfg.max_points) {
    std::cerr << "error: " << structure_path << ":1: structure exceeds --max-points\n";
    return 2;
  }
  Theory theory = load_theory(theory_path, structure.language);
  CheckReport report = check_theory(structure, theory, cfg.epsilon, cfg.tol);
  std::cout << render_check_report(report);
  return report.all_pass ? 0 : 1;
}

// ----- construct -----

int run_construct(const Config& cfg, const std::string& kind, const std::string& instance_path,
                  const std::string& emit_structure, const std::string& emit_theory) {
  if (kind == "stone") {
    FiniteProbabilityAlgebra algebra = load_stone_instance(instance_path, cfg.tol);
    Theory theory = stone_theory(algebra);
    InterpretedStructure model = stone_model(algebra);
    CheckReport check = check_theory(model, theory, cfg.epsilon, cfg.tol);
    VerificationReport iso = stone_isomorphism_check(algebra, model, cfg.tol);
    std::cout << render_stone_report(algebra, check, iso);
    if (!emit_structure.empty()) write_structure(emit_structure, model);
    if (!emit_theory.empty()) write_theory(emit_theory, theory);
    return check.all_pass && iso.all_pass ? 0 : 1;
  }

  DaniellInstance instance;
  std::optional<RieszInstance> grid_instance;
  if (kind == "riesz") {
    grid_instance = load_riesz_instance(instance_path);
    instance = grid_instance->base;
  } else {
    instance = load_daniell_instance(instance_path);
  }
  instance.epsilon = cfg.epsilon;
  if (static_cast<int>(instance.point_ids.size()) > cfg.max_points) {
    std::cerr << "error: " << instance_path << ":1: instance exceeds --max-points\n";
    return 2;
  }

  if (!instance.functional.has_value()) {
    // Value-table instances carry no evaluable functional, so only the theory
    // can be produced from them.
    if (!emit_structure.empty() || emit_theory.empty()) {
      std::cerr << "error: " << instance_path
                << ":1: value-table instances only support --emit-theory\n";
      return 2;
    }
    Theory theory = daniell_theory(instance);
    write_theory(emit_theory, theory);
    std::cout << "kind = " << kind << "\nmode = table\nstatements = " << theory.size()
              << "\nall_pass = true\n";
    return 0;
  }

  if (cfg.epsilon <= 0) {
    std::cerr << "error: " << instance_path << ":1: construct " << kind
              << " requires --epsilon > 0\n";
    return 2;
  }

  DaniellResult result = [&] {
    if (grid_instance) {
      grid_instance->base.epsilon = cfg.epsilon;
      return riesz_model(*grid_instance, cfg.tol);
    }
    return daniell_model(instance, cfg.tol);
  }();
  std::cout << render_construction_report(kind, result.report);
  if (!emit_structure.empty()) write_structure(emit_structure, result.model);
  if (!emit_theory.empty()) write_theory(emit_theory, daniell_theory(instance));
  return result.report.all_pass ? 0 : 1;
}

// ----- lemma -----

int run_tendtochar(const Config& cfg, const std::vector<std::string>& f_texts,
                   const std::vector<std::string>& interval_texts, const std::string& combine) {
  if (f_texts.empty()) input_error("tendtochar needs at least one --f");
  if (f_texts.size() != interval_texts.size())
    input_error("each --f needs a matching --interval");

  std::vector<Constraint> constraints;
  std::size_t n = 0;
  for (std::size_t i = 0; i < f_texts.size(); ++i) {
    LatticeFn f{parse_number_list(f_texts[i], "--f")};
    if (i == 0)
      n = f.size();
    else if (f.size() != n)
      input_error("all --f lists must have the same length");
    constraints.push_back(Constraint{std::move(f), parse_interval(interval_texts[i])});
  }
  bool all_open = true;
  bool all_closed = true;
  for (const Constraint& c : constraints) {
    all_open = all_open && c.interval.is_open_set();
    all_closed = all_closed && c.interval.is_closed_set();
  }
  if (!all_open && !all_closed)
    input_error("intervals mix open and closed endpoints; pick one mode");
  SeqMode mode = all_open ? SeqMode::open_sets : SeqMode::closed_sets;
  SeqCombine comb =
      combine == "union" ? SeqCombine::set_union : SeqCombine::intersection;

  IndicatorSeq seq = indicator_seq(constraints, mode, comb);
  std::cout << "lemma = tendtochar\n";
  std::cout << "mode = " << (mode == SeqMode::open_sets ? "open" : "closed") << '\n';
  std::cout << "combine = " << (comb == SeqCombine::intersection ? "intersection" : "union")
            << '\n';
  std::string target;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) target += ' ';
    target += seq.target()[i] ? '1' : '0';
  }
  std::cout << "target = " << target << '\n';

  std::optional<long long> star = stabilization_index(seq);
  long long last = star.value_or(kIterationCap);
  bool monotone = true;
  bool in_range = true;
  bool law = true;  // support law (open) / superset law (closed)
  LatticeFn prev = seq.at(1);
  for (long long nn : dyadic_samples(last)) {
    LatticeFn stage = seq.at(nn);
    std::cout << "n = " << nn << ": " << values_text(stage) << '\n';
    for (std::size_t i = 0; i < n; ++i) {
      double v = stage.values[i];
      if (v < 0.0 || v > 1.0) in_range = false;
      if (mode == SeqMode::open_sets) {
        if (v > 0.0 && !seq.target()[i]) law = false;
        if (v < prev.values[i]) monotone = false;
      } else {
        if (seq.target()[i] && v != 1.0) law = false;
        if (v > prev.values[i]) monotone = false;
      }
    }
    prev = std::move(stage);
  }
  bool stabilized = false;
  if (star) {
    LatticeFn fin = seq.at(*star);
    stabilized = true;
    for (std::size_t i = 0; i < n; ++i)
      if (fin.values[i] != (seq.target()[i] ? 1.0 : 0.0)) stabilized = false;
    std::cout << "n* = " << *star << '\n';
  } else {
    std::cout << "n* = none\n";
  }
  std::cout << "monotone = " << (monotone ? "true" : "false") << '\n';
  std::cout << "range_ok = " << (in_range ? "true" : "false") << '\n';
  std::cout << (mode == SeqMode::open_sets ? "support_law = " : "superset_law = ")
            << (law ? "true" : "false") << '\n';
  bool all_pass = stabilized && monotone && in_range && law;
  std::cout << "all_pass = " << (all_pass ? "true" : "false") << '\n';
  (void)cfg;
  return all_pass ? 0 : 1;
}

int run_inessential(const Config& cfg, const std::vector<std::string>& f_texts,
                    const std::string& window_text, const std::string& weights_text) {
  if (f_texts.empty()) input_error("inessential needs at least one --f");
  if (window_text.empty()) input_error("inessential needs --window \"(r,s)\"");
  if (weights_text.empty()) input_error("inessential needs --weights");
  Interval window = parse_interval(window_text);
  if (!window.is_open_set() || std::isinf(window.lo) || std::isinf(window.hi))
    input_error("--window must be a bounded open interval (r,s)");

  std::vector<LatticeFn> fs;
  std::size_t n = 0;
  for (const std::string& text : f_texts) {
    LatticeFn f{parse_number_list(text, "--f")};
    if (fs.empty())
      n = f.size();
    else if (f.size() != n)
      input_error("all --f lists must have the same length");
    fs.push_back(std::move(f));
  }
  std::vector<double> weights = parse_number_list(weights_text, "--weights");
  if (weights.size() != n) input_error("--weights length must match the functions");
  PositiveFunctional I = PositiveFunctional::from_weights(weights);

  double alpha = find_inessential(fs, window.lo, window.hi, I, cfg.tol);
  std::cout << "lemma = inessential\n";
  std::cout << "window = (" << format_real(window.lo) << ", " << format_real(window.hi) << ")\n";
  std::cout << "alpha = " << format_real(alpha) << '\n';
  bool all_pass = true;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    InessentialCheck chk = is_inessential(fs[i], alpha, I, cfg.tol);
    all_pass = all_pass && chk.inessential;
    std::cout << "limit f" << i << " = " << format_real(chk.limit)
              << " stabilized_at = " << chk.stabilized_at << ' '
              << (chk.inessential ? "pass" : "FAIL") << '\n';
  }
  std::cout << "all_pass = " << (all_pass ? "true" : "false") << '\n';
  return all_pass ? 0 : 1;
}

int run_refine_cover(const Config& cfg, const std::string& space_text,
                     const std::vector<std::string>& gen_texts,
                     const std::vector<std::string>& cover_texts) {
  if (space_text.empty()) input_error("refine_cover needs --space weights");
  if (gen_texts.empty()) input_error("refine_cover needs at least one --gen");
  if (cover_texts.empty()) input_error("refine_cover needs at least one --cover mask");
  if (cfg.epsilon <= 0) input_error("refine_cover needs --epsilon > 0");

  std::vector<double> weights = parse_number_list(space_text, "--space");
  std::size_t n = weights.size();
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
  FiniteMeasureSpace space = FiniteMeasureSpace::make(ids, weights);

  std::vector<LatticeFn> generators;
  for (const std::string& text : gen_texts) {
    LatticeFn f{parse_number_list(text, "--gen")};
    if (f.size() != n) input_error("--gen length must match --space");
    generators.push_back(std::move(f));
  }
  std::vector<Subset> cover;
  for (const std::string& text : cover_texts) cover.push_back(parse_mask(text, n));

  RefineReport report = refine_cover(space, generators, cover, cfg.epsilon);

  std::cout << "lemma = refine_cover\n";
  std::cout << "members = " << report.members.size() << '\n';
  Subset in_union = 0;
  for (Subset s : cover) in_union |= s;
  Subset out_union = 0;
  bool sets_match = true;
  bool zero_mass_ok = true;
  for (std::size_t k = 0; k < report.members.size(); ++k) {
    const CoverMember& m = report.members[k];
    Subset positivity = 0;
    double zero_mass = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (m.fn.values[i] > 0) positivity |= Subset{1} << i;
      if (m.fn.values[i] == 0.0) zero_mass += space.weights[i];
    }
    sets_match = sets_match && positivity == m.set;
    zero_mass_ok = zero_mass_ok && zero_mass <= cfg.tol;
    out_union |= m.set;
    std::cout << "member " << k << ": set = " << mask_text(m.set, n)
              << " measure = " << format_real(m.measure)
              << " zero_mass = " << format_real(zero_mass) << '\n';
  }
  bool covers_same = out_union == in_union;
  double bound = report.input_measure_sum + cfg.epsilon;
  bool sum_ok = report.output_measure_sum <= bound + cfg.tol;
  std::cout << "input_measure_sum = " << format_real(report.input_measure_sum) << '\n';
  std::cout << "output_measure_sum = " << format_real(report.output_measure_sum) << '\n';
  std::cout << "sum_bound = " << format_real(bound) << '\n';
  std::cout << "covers_same_union = " << (covers_same ? "true" : "false") << '\n';
  std::cout << "positivity_sets_match = " << (sets_match ? "true" : "false") << '\n';
  std::cout << "zero_level_mass_zero = " << (zero_mass_ok ? "true" : "false") << '\n';
  bool all_pass = covers_same && sets_match && zero_mass_ok && sum_ok;
  std::cout << "all_pass = " << (all_pass ? "true" : "false") << '\n';
  return all_pass ? 0 : 1;
}

int run_special_pair(const Config& cfg, const std::string& f_text, const std::string& g_text,
                     const std::string& weights_text) {
  if (f_text.empty() || g_text.empty()) input_error("special_pair needs --f and --g");
  LatticeFn f{parse_number_list(f_text, "--f")};
  LatticeFn g{parse_number_list(g_text, "--g")};
  if (f.size() != g.size()) input_error("--f and --g lengths differ");
  std::optional<std::vector<double>> weights;
  if (!weights_text.empty()) {
    weights = parse_number_list(weights_text, "--weights");
    if (weights->size() != f.size()) input_error("--weights length must match --f");
  }
  SpecialPairKind kind =
      check_special_pair(f, g, weights ? &*weights : nullptr, cfg.tol);
  LatticeFn star = star_combine(f, g);
  std::cout << "lemma = special_pair\n";
  std::cout << "star = " << values_text(star) << '\n';
  const char* label = kind == SpecialPairKind::exact    ? "exact"
                      : kind == SpecialPairKind::almost ? "almost"
                                                        : "neither";
  std::cout << "kind = " << label << '\n';
  bool all_pass = kind != SpecialPairKind::neither;
  std::cout << "all_pass = " << (all_pass ? "true" : "false") << '\n';
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for integration-logic structures and their model constructions"};
  app.require_subcommand(1);
  Config cfg;

  auto* check_cmd = app.add_subcommand("check", "evaluate a theory against a structure");
  std::string structure_path, theory_path;
  check_cmd->add_option("structure", structure_path, "structure file")->required();
  check_cmd->add_option("theory", theory_path, "theory file")->required();
  add_common_flags(check_cmd, cfg);

  auto* construct_cmd = app.add_subcommand("construct", "build a model from an instance file");
  std::string kind, instance_path, emit_structure, emit_theory;
  construct_cmd->add_option("kind", kind, "stone, daniell or riesz")
      ->required()
      ->check(CLI::IsMember({"stone", "daniell", "riesz"}));
  construct_cmd->add_option("instance", instance_path, "instance file")->required();
  construct_cmd->add_option("--emit-structure", emit_structure,
                            "write the constructed model as a structure file");
  construct_cmd->add_option("--emit-theory", emit_theory, "write the instance theory");
  add_common_flags(construct_cmd, cfg);

  auto* lemma_cmd = app.add_subcommand("lemma", "run one lattice construction with its checks");
  std::string lemma_name, combine = "intersection", window_text, space_text;
  std::string pair_f, pair_g, weights_text;
  std::vector<std::string> f_texts, interval_texts, gen_texts, cover_texts;
  lemma_cmd
      ->add_option("name", lemma_name, "tendtochar, inessential, refine_cover or special_pair")
      ->required()
      ->check(CLI::IsMember({"tendtochar", "inessential", "refine_cover", "special_pair"}));
  lemma_cmd->add_option("--f", f_texts, "comma-separated function values (repeatable)");
  lemma_cmd->add_option("--g", pair_g, "comma-separated function values");
  lemma_cmd->add_option("--interval", interval_texts, "interval like (0.5,inf) (repeatable)");
  lemma_cmd->add_option("--combine", combine, "intersection or union")
      ->check(CLI::IsMember({"intersection", "union"}));
  lemma_cmd->add_option("--window", window_text, "open interval (r,s) to search");
  lemma_cmd->add_option("--weights", weights_text, "comma-separated point weights");
  lemma_cmd->add_option("--space", space_text, "comma-separated point weights");
  lemma_cmd->add_option("--gen", gen_texts, "comma-separated generator values (repeatable)");
  lemma_cmd->add_option("--cover", cover_texts, "0/1 membership mask (repeatable)");
  add_common_flags(lemma_cmd, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check_cmd) return run_check(cfg, structure_path, theory_path);
    if (*construct_cmd)
      return run_construct(cfg, kind, instance_path, emit_structure, emit_theory);
    if (lemma_name == "tendtochar") return run_tendtochar(cfg, f_texts, interval_texts, combine);
    if (lemma_name == "inessential")
      return run_inessential(cfg, f_texts, window_text, weights_text);
    if (lemma_name == "refine_cover")
      return run_refine_cover(cfg, space_text, gen_texts, cover_texts);
    if (lemma_name == "special_pair") {
      if (f_texts.size() > 1) input_error("special_pair takes a single --f");
      return run_special_pair(cfg, f_texts.empty() ? pair_f : f_texts.front(), pair_g,
                              weights_text);
    }
  } catch (const IoError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
