// pseudoq: command-line front end for the pseudo-orthonormal toolkit.
//
// Documents go in and out as canonical JSON (see docs/formats.md). Every
// matrix payload inside a report is itself a complete document, so it can
// be saved with jq and fed straight back into another command.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <pseudoq/pseudoq.hpp>

namespace {

using namespace pseudoq;
using io::Json;
using io::Kind;
using io::MatrixDocument;

std::string slurp(const std::string& path) {
  if (path == "-")
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io::SchemaError("cannot open input: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

MatrixDocument load(const std::string& path) {
  return io::parse_document(slurp(path));
}

MatrixDocument load_kind(const std::string& path, Kind want, const char* role) {
  MatrixDocument d = load(path);
  if (d.kind != want)
    throw io::SchemaError(std::string(role) + " must be a " +
                          io::kind_name(want) + " document, got " +
                          io::kind_name(d.kind));
  return d;
}

void emit(const Json& j, bool pretty) {
  std::fputs(io::canonical_dump(j, pretty).c_str(), stdout);
}

void emit_error(const std::string& kind, const std::string& message,
                bool pretty) {
  Json e;
  e["error"]["kind"] = kind;
  e["error"]["message"] = message;
  std::fputs(io::canonical_dump(e, pretty).c_str(), stderr);
}

Json subdoc(Kind kind, const Mat2& m) {
  MatrixDocument d;
  d.kind = kind;
  d.m2 = m;
  return io::doc_json(d);
}

Json subdoc(Kind kind, const Mat4& m) {
  MatrixDocument d;
  d.kind = kind;
  d.m4 = m;
  return io::doc_json(d);
}

Json state_doc(const StateVector& v, std::optional<std::string> label = {}) {
  MatrixDocument d;
  d.kind = Kind::StateVector;
  d.label = std::move(label);
  d.vec = v;
  return io::doc_json(d);
}

Json lambdas_json(const std::array<double, 4>& l) {
  Json a = Json::array();
  for (double x : l) a.push_back(x);
  return a;
}

int cmd_flip(const std::string& input, bool pretty) {
  MatrixDocument d = load(input);
  switch (d.kind) {
    case Kind::StateVector: d.vec = spin_flip_state(d.vec); break;
    case Kind::Operator2: d.m2 = spin_flip_op2(d.m2); break;
    case Kind::Operator4: d.m4 = spin_flip_op4(d.m4); break;
    case Kind::DensityMatrix:
      throw io::SchemaError(
          "flip takes state_vector, operator2 or operator4 documents");
  }
  emit(io::doc_json(d), pretty);
  return 0;
}

int cmd_analyze(const std::string& input, bool pretty) {
  const MatrixDocument d = load_kind(input, Kind::DensityMatrix, "analyze input");
  const PseudoSpectrum ps = pseudo_diagonalize(d.m4);

  Mat4 rec;
  for (std::size_t k = 0; k < ps.rank; ++k)
    rec += Complex(ps.lambdas[k]) * outer(ps.vectors[k], ps.vectors[k]);

  Json rep;
  rep["format"] = 1;
  rep["kind"] = "analysis";
  rep["lambdas"] = lambdas_json(ps.lambdas);
  rep["rank"] = ps.rank;
  rep["concurrence"] = concurrence_mixed(d.m4);
  rep["reconstruction_residual"] = max_abs(rec - d.m4);
  Json vecs = Json::array();
  for (std::size_t k = 0; k < ps.rank; ++k)
    vecs.push_back(state_doc(ps.vectors[k], "x" + std::to_string(k + 1)));
  rep["vectors"] = vecs;
  emit(rep, pretty);
  return 0;
}

int cmd_check(const std::string& rho_path, const std::string& sigma_path,
              double tolerance, bool pretty) {
  const MatrixDocument r = load_kind(rho_path, Kind::DensityMatrix, "check rho");
  const MatrixDocument s = load_kind(sigma_path, Kind::DensityMatrix, "check sigma");
  const TransformDecision dec = transformable(r.m4, s.m4, tolerance);

  Json rep;
  rep["format"] = 1;
  rep["kind"] = "decision";
  rep["transformable"] = dec.yes;
  if (!dec.yes) rep["reason"] = dec.reason;
  rep["lambdas_rho"] = lambdas_json(dec.lambdas_rho);
  rep["lambdas_sigma"] = lambdas_json(dec.lambdas_sigma);
  if (dec.yes) rep["witness"] = subdoc(Kind::Operator4, dec.witness);
  emit(rep, pretty);
  return dec.yes ? 0 : 1;
}

int cmd_synth(const std::string& rho_path, const std::string& sigma_path,
              bool pretty) {
  const MatrixDocument r = load_kind(rho_path, Kind::DensityMatrix, "synth rho");
  const MatrixDocument s = load_kind(sigma_path, Kind::DensityMatrix, "synth sigma");

  TransformPlan plan;
  try {
    plan = synthesize_action(r.m4, s.m4);
  } catch (const Error& e) {
    if (e.code() == Errc::NotTransformable) {
      emit_error(errc_name(e.code()), e.what(), pretty);
      return 1;
    }
    throw;
  }
  const FilterResult fr = apply_local_filter(r.m4, plan.a, plan.b);

  Json rep;
  rep["format"] = 1;
  rep["kind"] = "plan";
  rep["a"] = subdoc(Kind::Operator2, plan.a);
  rep["b"] = subdoc(Kind::Operator2, plan.b);
  rep["success_probability"] = plan.success_probability;
  rep["verification"]["residual"] = max_abs(fr.sigma - s.m4);
  emit(rep, pretty);
  return 0;
}

int cmd_apply(const std::string& rho_path, const std::string& a_path,
              const std::string& b_path, bool pretty) {
  const MatrixDocument r = load_kind(rho_path, Kind::DensityMatrix, "apply rho");
  const MatrixDocument a = load_kind(a_path, Kind::Operator2, "apply A");
  const MatrixDocument b = load_kind(b_path, Kind::Operator2, "apply B");
  const FilterResult fr = apply_local_filter(r.m4, a.m2, b.m2);

  Json rep;
  rep["format"] = 1;
  rep["kind"] = "filtered";
  rep["probability"] = fr.probability;
  rep["sigma"] = subdoc(Kind::DensityMatrix, fr.sigma);
  emit(rep, pretty);
  return 0;
}

int cmd_repmat(const std::string& a_path, const std::string& b_path,
               bool pretty) {
  const MatrixDocument a = load_kind(a_path, Kind::Operator2, "repmat A");
  const MatrixDocument b = load_kind(b_path, Kind::Operator2, "repmat B");

  // Project onto determinant one so any invertible pair is accepted; the
  // representation only sees the projected operators.
  const auto unimodular = [](const Mat2& m, const char* role) {
    const Complex det = determinant(m);
    if (std::abs(det) <= 1e-12)
      throw Error(Errc::Singular,
                  std::string("repmat ") + role + " has near-zero determinant");
    return Complex(1.0) / std::sqrt(det) * m;
  };
  const Mat4 d = sl2_pair_to_so4(unimodular(a.m2, "A"), unimodular(b.m2, "B"));

  MatrixDocument out;
  out.kind = Kind::Operator4;
  out.m4 = d;
  emit(io::doc_json(out), pretty);
  return 0;
}

int cmd_factor(const std::string& input, double tolerance, bool pretty) {
  const MatrixDocument d = load_kind(input, Kind::Operator4, "factor input");

  LocalPair lp;
  try {
    lp = kronecker_factor(d.m4, tolerance);
  } catch (const Error& e) {
    if (e.code() == Errc::NotProductForm) {
      emit_error(errc_name(e.code()), e.what(), pretty);
      return 1;
    }
    throw;
  }

  Json rep;
  rep["format"] = 1;
  rep["kind"] = "local_pair";
  rep["a"] = subdoc(Kind::Operator2, lp.a);
  rep["b"] = subdoc(Kind::Operator2, lp.b);
  rep["scale"] = io::pair_json(lp.scale);
  rep["residual"] = max_abs(lp.scale * kron(lp.a, lp.b) - d.m4);
  emit(rep, pretty);
  return 0;
}

int cmd_selftest(std::uint64_t seed, int rounds, bool pretty) {
  FaultHooks hooks;
#ifdef PSEUDOQ_SELFTEST_FAULT
  hooks.flip_sign = true;
#endif
  const SelftestReport r = run_selftest(seed, rounds, hooks);

  Json rep;
  rep["format"] = 1;
  rep["kind"] = "selftest";
  rep["seed"] = r.seed;
  rep["rounds"] = r.rounds;
  rep["ok"] = r.ok;
  Json suites = Json::array();
  for (const SuiteResult& s : r.suites) {
    Json sj;
    sj["name"] = s.name;
    sj["rounds"] = s.rounds;
    sj["max_residual"] = s.max_residual;
    sj["ok"] = s.ok;
    if (!s.ok) {
      sj["failure"] = s.failure;
      sj["counterexample"] = s.counterexample;
    }
    suites.push_back(sj);
  }
  rep["suites"] = suites;
  emit(rep, pretty);
  return r.ok ? 0 : 4;
}

std::uint64_t selftest_seed(const CLI::Option* seed_opt, std::uint64_t flag_value) {
  if (seed_opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("SEED")) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0')
      throw io::SchemaError("SEED must be a nonnegative integer");
    return v;
  }
  return 42;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudoq: pseudo-orthonormal bases, the SL(2,C)xSL(2,C) "
               "representation, Kronecker factorization, and two-qubit "
               "local-filtering transforms"};
  app.require_subcommand(1);

  double tol_value = 0.0;
  CLI::Option* tol_opt =
      app.add_option("--tol", tol_value,
                     "tolerance override (check: spectrum match, default 1e-6; "
                     "factor: product-form test, default 1e-8)")
          ->check(CLI::PositiveNumber);
  std::uint64_t seed_value = 42;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_value, "selftest seed (default 42)");
  bool pretty = false;
  app.add_flag("--pretty", pretty, "indent the JSON output");

  std::string in1, in2, in3;
  int rounds = 100;

  CLI::App* c_flip = app.add_subcommand("flip", "spin-flip a state or operator");
  c_flip->add_option("input", in1, "document path or -")->required();

  CLI::App* c_analyze =
      app.add_subcommand("analyze", "pseudo-diagonalize a density matrix");
  c_analyze->add_option("input", in1, "density_matrix path or -")->required();

  CLI::App* c_check = app.add_subcommand(
      "check", "decide whether rho can be filtered into sigma");
  c_check->add_option("rho", in1, "density_matrix path or -")->required();
  c_check->add_option("sigma", in2, "density_matrix path or -")->required();

  CLI::App* c_synth = app.add_subcommand(
      "synth", "synthesize the local action turning rho into sigma");
  c_synth->add_option("rho", in1, "density_matrix path or -")->required();
  c_synth->add_option("sigma", in2, "density_matrix path or -")->required();

  CLI::App* c_apply =
      app.add_subcommand("apply", "apply a local filter pair to a state");
  c_apply->add_option("rho", in1, "density_matrix path or -")->required();
  c_apply->add_option("a", in2, "operator2 path or -")->required();
  c_apply->add_option("b", in3, "operator2 path or -")->required();

  CLI::App* c_repmat = app.add_subcommand(
      "repmat", "representation matrix of an operator pair in the magic basis");
  c_repmat->add_option("a", in1, "operator2 path or -")->required();
  c_repmat->add_option("b", in2, "operator2 path or -")->required();

  CLI::App* c_factor = app.add_subcommand(
      "factor", "factor an operator4 into scale * A (x) B");
  c_factor->add_option("input", in1, "operator4 path or -")->required();

  CLI::App* c_selftest = app.add_subcommand(
      "selftest", "run the randomized property suites of every module");
  c_selftest->add_option("--rounds", rounds, "rounds per suite (default 100)")
      ->check(CLI::Range(1, 1000000000));

  for (CLI::App* sub : {c_flip, c_analyze, c_check, c_synth, c_apply, c_repmat,
                        c_factor, c_selftest})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_flip->parsed()) return cmd_flip(in1, pretty);
    if (c_analyze->parsed()) return cmd_analyze(in1, pretty);
    if (c_check->parsed())
      return cmd_check(in1, in2, tol_opt->count() ? tol_value : 1e-6, pretty);
    if (c_synth->parsed()) return cmd_synth(in1, in2, pretty);
    if (c_apply->parsed()) return cmd_apply(in1, in2, in3, pretty);
    if (c_repmat->parsed()) return cmd_repmat(in1, in2, pretty);
    if (c_factor->parsed())
      return cmd_factor(in1, tol_opt->count() ? tol_value : tol::hard, pretty);
    if (c_selftest->parsed())
      return cmd_selftest(selftest_seed(seed_opt, seed_value), rounds, pretty);
  } catch (const io::SchemaError& e) {
    emit_error("schema", e.what(), pretty);
    return 2;
  } catch (const Error& e) {
    emit_error(errc_name(e.code()), e.what(), pretty);
    return 3;
  } catch (const std::exception& e) {
    emit_error("internal", e.what(), pretty);
    return 3;
  }
  return 2;
}
