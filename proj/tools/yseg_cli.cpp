// yseg: command-line front end. Every subcommand reads and writes files only
// at the paths it is given and leaves a <out>.manifest.json next to its
// primary output. Passing that manifest back through --config reruns the
// same computation.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "yseg/grid_io.hpp"
#include "yseg/label_transform.hpp"
#include "yseg/losses.hpp"
#include "yseg/metrics.hpp"
#include "yseg/parallel.hpp"
#include "yseg/postprocess.hpp"
#include "yseg/scene.hpp"
#include "yseg/simulators.hpp"
#include "yseg/softmax.hpp"
#include "yseg/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace yseg;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Run {
  json inputs = json::array();
  json outputs = json::array();

  void input(const std::string& p) { inputs.push_back(p); }
  void output(const std::string& p) { outputs.push_back(p); }
};

std::ofstream open_out(const std::string& path) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw GridIoError(IoErrorKind::open_failed, "cannot write " + path);
  return f;
}

void write_text(Run& run, const std::string& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  run.output(path);
}

void write_json(Run& run, const std::string& path, const json& j) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  write_text(run, path, j.dump(2) + "\n");
}

template <typename G>
void save_grid(Run& run, const G& g, const std::string& path) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  write_grid(g, path);
  run.output(path);
}

ProbabilityField one_hot_target(Run& run, const std::string& path, std::size_t classes) {
  run.input(path);
  return one_hot(read_semantic_map(path), classes);
}

// ---------------------------------------------------------------------------
// Options shared by several subcommands.

// Enumerated choices are kept as strings so manifests record the names.
struct SceneOptions {
  SceneSpec spec;
  std::string kind = "two-squares-notch";
  SceneSpec resolve(std::uint64_t seed) const {
    SceneSpec s = spec;
    s.kind = parse_scene_kind(kind);
    s.seed = seed;
    return s;
  }
};

void add_scene_options(CLI::App* sub, SceneOptions& o) {
  SceneSpec& s = o.spec;
  sub->add_option("--scene", o.kind, "two-squares-notch | random-blobs")
      ->check(CLI::IsMember({"two-squares-notch", "random-blobs"}));
  sub->add_option("--dims", s.dims, "grid extents, slowest axis first")->expected(2, 3);
  sub->add_option("--side", s.side, "square side");
  sub->add_option("--notch-width", s.notch_width);
  sub->add_option("--notch-length", s.notch_length);
  sub->add_option("--blobs", s.blob_count);
  sub->add_option("--radius-min", s.radius_min);
  sub->add_option("--radius-max", s.radius_max);
  sub->add_option("--min-separation", s.min_separation);
}

struct TransformOptions {
  TransformConfig cfg;
  int classes = 4;
  TransformConfig resolve() const {
    TransformConfig t = cfg;
    t.mode = classes == 3 ? ClassMode::three_class : ClassMode::four_class;
    return t;
  }
};

void add_transform_options(CLI::App* sub, TransformOptions& o) {
  sub->add_option("--k", o.cfg.k, "touching radius (Chebyshev)");
  sub->add_option("--gap-radius", o.cfg.gap_radius, "structuring element radius");
  sub->add_option("--classes", o.classes, "3 or 4")->check(CLI::IsMember({3, 4}));
}

struct PostOptions {
  PostprocessConfig cfg;
  std::string gap_mode = "map3", connectivity = "face", tie_break = "lower";
  PostprocessConfig resolve() const {
    PostprocessConfig p = cfg;
    p.gap_mode = parse_gap_mode(gap_mode);
    p.connectivity = parse_connectivity(connectivity);
    p.tie_break = tie_break == "lower" ? TieBreak::lower_label : TieBreak::higher_label;
    return p;
  }
};

void add_post_options(CLI::App* sub, PostOptions& o) {
  sub->add_option("--gap-mode", o.gap_mode, "map3 | background | dubious")
      ->check(CLI::IsMember({"map3", "background", "dubious"}));
  sub->add_option("--tau", o.cfg.tau, "threshold of the dubious gap mode");
  sub->add_option("--connectivity", o.connectivity, "face | full")->check(CLI::IsMember({"face", "full"}));
  sub->add_option("--tie-break", o.tie_break, "lower | higher")->check(CLI::IsMember({"lower", "higher"}));
}

CLI::Option* add_loss_option(CLI::App* sub, std::string& id) {
  return sub->add_option("--loss", id, "ce | j | jc | bwm | dsc")
      ->check(CLI::IsMember({"ce", "j", "jc", "bwm", "dsc"}));
}

PairWeights load_weights(Run& run, const std::string& path, std::size_t classes) {
  if (path.empty()) return PairWeights::uniform(classes);
  run.input(path);
  std::ifstream f(path);
  if (!f) throw GridIoError(IoErrorKind::open_failed, "cannot read " + path);
  const auto j = json::parse(f);
  std::vector<double> flat;
  if (j.size() != classes) throw DataError("weights: expected " + std::to_string(classes) + " rows");
  for (const auto& row : j) {
    if (row.size() != classes) throw DataError("weights: expected " + std::to_string(classes) + " columns");
    for (const auto& v : row) flat.push_back(v.get<double>());
  }
  return PairWeights(classes, std::move(flat));
}

json components_json(const std::map<std::string, double>& c) {
  json j = json::object();
  for (const auto& [k, v] : c) j[k] = v;
  return j;
}

// ---------------------------------------------------------------------------
// Subcommands.

struct GenScene {
  SceneOptions spec;
  std::string out;

  void attach(CLI::App* sub) {
    add_scene_options(sub, spec);
    sub->add_option("--out", out, "instance map (.grd or .pgm)")->required();
  }
  void run(Run& r, std::uint64_t seed) {
    save_grid(r, generate_scene(spec.resolve(seed)), out);
  }
};

struct Transform {
  std::string in, out, one_hot_out;
  TransformOptions opts;

  void attach(CLI::App* sub) {
    sub->add_option("--in", in, "instance map")->required();
    sub->add_option("--out", out, "semantic map")->required();
    sub->add_option("--one-hot", one_hot_out, "also write the one-hot probability field here");
    add_transform_options(sub, opts);
  }
  void run(Run& r) {
    const auto cfg = opts.resolve();
    r.input(in);
    const auto h = to_semantic(read_instance_map(in), cfg);
    save_grid(r, h, out);
    if (!one_hot_out.empty()) save_grid(r, one_hot(h, cfg.channels()), one_hot_out);
  }
};

struct LossEval {
  std::string target, pred, logits, weights, out;
  std::size_t classes = 4;
  std::string loss_name = "jc";

  void attach(CLI::App* sub) {
    sub->add_option("--target", target, "semantic map")->required();
    auto* p = sub->add_option("--pred", pred, "probability field");
    auto* l = sub->add_option("--logits", logits, "logit field");
    p->excludes(l);
    sub->add_option("--classes", classes, "channels of the target one-hot encoding");
    sub->add_option("--weights", weights, "JSON matrix of pair weights");
    add_loss_option(sub, loss_name);
    sub->add_option("--out", out, "JSON result (stdout when omitted)");
  }
  void run(Run& r) {
    const LossId loss = parse_loss_id(loss_name);
    if (pred.empty() == logits.empty()) throw UsageError("loss-eval needs exactly one of --pred or --logits");
    const auto y = one_hot_target(r, target, classes);
    const auto t = Target::from_one_hot(y);
    const auto w = load_weights(r, weights, classes);
    LossValue v;
    if (!pred.empty()) {
      r.input(pred);
      v = evaluate_loss(loss, t, read_probability_field(pred), w, true);
    } else {
      r.input(logits);
      v = evaluate_loss(loss, t, read_logit_field(logits), w);
    }
    json j;
    j["loss"] = std::string(to_string(loss));
    j["value"] = v.total;
    j["components"] = components_json(v.components);
    j["grad_norm"] = l2_norm(*v.gradient);
    write_json(r, out, j);
  }
};

struct GradCheck {
  std::string loss = "jc", weights, out;
  std::size_t trials = 100, classes = 4;
  double step = 1e-5;

  void attach(CLI::App* sub) {
    sub->add_option("--loss", loss, "ce | j | jc | bwm | dsc | all");
    sub->add_option("--trials", trials);
    sub->add_option("--classes", classes);
    sub->add_option("--step", step, "central difference step");
    sub->add_option("--weights", weights, "JSON matrix of pair weights");
    sub->add_option("--out", out, "JSON result (stdout when omitted)");
  }
  void run(Run& r, std::uint64_t seed) {
    std::vector<LossId> ids;
    if (loss == "all") {
      ids.assign(std::begin(kAllLosses), std::end(kAllLosses));
    } else {
      try {
        ids.push_back(parse_loss_id(loss));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    const auto w = load_weights(r, weights, classes);
    json results = json::array();
    for (auto id : ids) {
      const auto res = grad_check(id, seed, trials, classes, w, step);
      json j;
      j["loss"] = std::string(to_string(id));
      j["trials"] = res.trials;
      j["components"] = components_json(res.mean_components);
      j["grad_max_rel_err"] = res.max_rel_err;
      results.push_back(j);
    }
    write_json(r, out, ids.size() == 1 ? results[0] : results);
  }
};

struct SimImbalance {
  ImbalanceSimConfig cfg;
  std::string classifier = "c1", out, summary;

  void attach(CLI::App* sub) {
    sub->add_option("--classifier", classifier, "c1 | c3")->check(CLI::IsMember({"c1", "c3"}));
    sub->add_option("--pis", cfg.pis, "imbalance ratios");
    sub->add_option("--samples", cfg.samples, "samples per trial");
    sub->add_option("--trials", cfg.trials, "trials per ratio");
    sub->add_option("--out", out, "per-trial CSV")->required();
    sub->add_option("--summary", summary, "per-ratio JSON summary");
  }
  void run(Run& r, std::uint64_t seed) {
    cfg.seed = seed;
    cfg.classifier = parse_classifier(classifier);
    const auto res = run_imbalance_sim(cfg);
    std::ostringstream csv;
    csv << "pi,trial";
    for (auto m : kBinaryMeasures) csv << ',' << m;
    csv << '\n';
    for (const auto& t : res.trials) {
      csv << num(t.pi) << ',' << t.trial;
      for (double v : t.measures) csv << ',' << num(v);
      csv << '\n';
    }
    write_text(r, out, csv.str());
    if (summary.empty()) return;

    json j;
    j["classifier"] = std::string(to_string(cfg.classifier));
    j["resampled"] = res.resampled;
    json rows = json::array();
    for (const auto& s : res.summary) {
      json row;
      row["pi"] = s.pi;
      for (std::size_t k = 0; k < 6; ++k) {
        row[std::string(kBinaryMeasures[k]) + "_mean"] = s.mean[k];
        row[std::string(kBinaryMeasures[k]) + "_std"] = s.stddev[k];
      }
      rows.push_back(row);
    }
    j["per_pi"] = rows;
    if (cfg.classifier == ClassifierKind::c3) {
      json corr = json::array();
      for (const auto& c : mcc_j_correlation(res)) corr.push_back({{"pi", c.pi}, {"pearson_mcc_j", c.r}});
      j["correlation"] = corr;
    }
    write_json(r, summary, j);
  }
};

struct SimShrinkwrap {
  ShrinkwrapConfig cfg;
  SceneOptions scene;
  TransformOptions transform;
  std::string out, summary;

  void attach(CLI::App* sub) {
    add_scene_options(sub, scene);
    add_transform_options(sub, transform);
    sub->add_option("--initial-margin", cfg.initial_margin);
    sub->add_option("--iterations-per-margin", cfg.iterations_per_margin);
    sub->add_option("--initial-confidence", cfg.initial_confidence);
    sub->add_option("--final-confidence", cfg.final_confidence);
    sub->add_option("--ramp", cfg.ramp_iterations, "iterations of the final move to the one-hot target");
    sub->add_option("--iterations", cfg.iterations, "0 = end of ramp plus one");
    sub->add_option("--out", out, "trajectory CSV")->required();
    sub->add_option("--summary", summary, "JSON with peaks and shrinkwrap ratios");
  }
  void run(Run& r) {
    cfg.scene = scene.resolve(0);
    cfg.transform = transform.resolve();
    const auto w = PairWeights::uniform(cfg.transform.channels());
    const auto res = run_shrinkwrap(cfg, w);
    std::ostringstream csv;
    csv << "iteration,margin,confidence,ramp,grad_ce,grad_j,grad_jc\n";
    double peak[3] = {0, 0, 0};
    for (const auto& x : res.records) {
      csv << x.iteration << ',' << x.margin << ',' << num(x.confidence) << ',' << num(x.ramp) << ','
          << num(x.grad_ce) << ',' << num(x.grad_j) << ',' << num(x.grad_jc) << '\n';
      peak[0] = std::max(peak[0], x.grad_ce);
      peak[1] = std::max(peak[1], x.grad_j);
      peak[2] = std::max(peak[2], x.grad_jc);
    }
    write_text(r, out, csv.str());
    if (summary.empty()) return;
    const auto& sw = res.records[res.shrinkwrap_iteration];
    const auto& last = res.records.back();
    json j;
    j["shrinkwrap_iteration"] = res.shrinkwrap_iteration;
    j["peak"] = {{"ce", peak[0]}, {"j", peak[1]}, {"jc", peak[2]}};
    j["shrinkwrap_ratio"] = {{"ce", sw.grad_ce / peak[0]}, {"j", sw.grad_j / peak[1]}, {"jc", sw.grad_jc / peak[2]}};
    j["final_ratio"] = {{"ce", last.grad_ce / peak[0]}, {"j", last.grad_j / peak[1]}, {"jc", last.grad_jc / peak[2]}};
    write_json(r, summary, j);
  }
};

struct Landscape {
  LandscapeConfig cfg;
  std::string loss = "jc", target, weights, out;
  std::size_t classes = 4;
  double margin = 8.0;

  void attach(CLI::App* sub) {
    add_loss_option(sub, loss);
    sub->add_option("--target", target, "semantic map (default: two-squares-notch ground truth)");
    sub->add_option("--classes", classes);
    sub->add_option("--weights", weights, "JSON matrix of pair weights");
    sub->add_option("--resolution", cfg.resolution, "odd number of samples per axis");
    sub->add_option("--span", cfg.span, "scan [-span, span] along both directions");
    sub->add_option("--margin", margin, "logit margin of the optimum");
    sub->add_option("--out", out, "CSV matrix")->required();
  }
  void run(Run& r, std::uint64_t seed) {
    cfg.seed = seed;
    cfg.loss = parse_loss_id(loss);
    ProbabilityField y;
    if (target.empty()) {
      y = one_hot(to_semantic(generate_scene(SceneSpec{}), TransformConfig{}), 4);
      classes = 4;
    } else {
      y = one_hot_target(r, target, classes);
    }
    const auto w = load_weights(r, weights, classes);
    const auto res = landscape_scan(cfg, y, optimal_logits(y, margin), w);
    std::ostringstream csv;
    csv << "a\\b";
    for (double b : res.coords) csv << ',' << num(b);
    csv << '\n';
    for (std::size_t i = 0; i < res.resolution; ++i) {
      csv << num(res.coords[i]);
      for (std::size_t k = 0; k < res.resolution; ++k) csv << ',' << num(res.at(i, k));
      csv << '\n';
    }
    write_text(r, out, csv.str());
  }
};

struct Postprocess {
  std::string in, out;
  PostOptions opts;

  void attach(CLI::App* sub) {
    sub->add_option("--in", in, "probability field")->required();
    sub->add_option("--out", out, "instance map (.grd or .pgm)")->required();
    add_post_options(sub, opts);
  }
  void run(Run& r) {
    r.input(in);
    save_grid(r, postprocess(read_probability_field(in), opts.resolve()), out);
  }
};

struct Evaluate {
  std::vector<std::string> gt, pred;
  std::string out, summary;

  void attach(CLI::App* sub) {
    sub->add_option("--gt", gt, "ground-truth instance maps")->required();
    sub->add_option("--pred", pred, "predicted instance maps, same order")->required();
    sub->add_option("--out", out, "per-image CSV")->required();
    sub->add_option("--summary", summary, "JSON with mean scores");
  }
  void run(Run& r) {
    if (gt.size() != pred.size()) throw UsageError("evaluate: --gt and --pred need the same number of files");
    std::ostringstream csv;
    csv << "image,p05,rq,sq,pq\n";
    const char* keys[] = {"p05", "rq", "sq", "pq"};
    double mean[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < gt.size(); ++i) {
      r.input(gt[i]);
      r.input(pred[i]);
      const auto m = panoptic(read_instance_map(gt[i]), read_instance_map(pred[i]));
      csv << i;
      for (int k = 0; k < 4; ++k) {
        csv << ',' << num(m.at(keys[k]));
        mean[k] += m.at(keys[k]) / static_cast<double>(gt.size());
      }
      csv << '\n';
    }
    write_text(r, out, csv.str());
    if (summary.empty()) return;
    json j;
    j["images"] = gt.size();
    for (int k = 0; k < 4; ++k) j[keys[k]] = mean[k];
    write_json(r, summary, j);
  }
};

struct TrainToy {
  SceneOptions scene;
  TransformOptions transform;
  PostOptions post;
  TrainConfig cfg;
  std::string loss = "jc", optimizer = "gd", init = "zeros", weights, out, summary;

  void attach(CLI::App* sub) {
    add_scene_options(sub, scene);
    add_transform_options(sub, transform);
    add_post_options(sub, post);
    add_loss_option(sub, loss);
    sub->add_option("--step", cfg.step, "learning rate");
    sub->add_option("--iterations", cfg.iterations);
    sub->add_option("--log-period", cfg.log_period, "iterations between PQ evaluations");
    sub->add_option("--optimizer", optimizer, "gd | adam")->check(CLI::IsMember({"gd", "adam"}));
    sub->add_option("--init", init, "zeros | shrinkwrap | random")
        ->check(CLI::IsMember({"zeros", "shrinkwrap", "random"}));
    sub->add_option("--init-confidence", cfg.init_confidence);
    sub->add_option("--weights", weights, "JSON matrix of pair weights");
    sub->add_option("--out", out, "trace CSV")->required();
    sub->add_option("--summary", summary, "JSON with milestones");
  }

  static void emit(Run& r, const std::string& path, const TrainTrace& t) {
    std::ostringstream csv;
    std::vector<std::string> names;
    if (!t.records.empty())
      for (const auto& [k, v] : t.records.front().components) names.push_back(k);
    csv << "iteration,total";
    for (const auto& n : names) csv << ',' << n;
    csv << ",pq,notch_correct\n";
    for (const auto& x : t.records) {
      csv << x.iteration << ',' << num(x.total);
      for (const auto& n : names) csv << ',' << num(x.components.at(n));
      csv << ',' << (x.pq ? num(*x.pq) : "") << ',' << (x.notch_correct ? 1 : 0) << '\n';
    }
    write_text(r, path, csv.str());
  }

  void run(Run& r, std::uint64_t seed) {
    cfg.seed = seed;
    cfg.loss = parse_loss_id(loss);
    cfg.optimizer = parse_optimizer(optimizer);
    cfg.init = parse_train_init(init);
    cfg.post = post.resolve();
    const auto tcfg = transform.resolve();
    const auto g = generate_scene(scene.resolve(seed));
    const auto y = one_hot(to_semantic(g, tcfg), tcfg.channels());
    const auto w = load_weights(r, weights, tcfg.channels());
    TrainTrace trace;
    try {
      trace = train(g, y, cfg, w);
    } catch (const TrainingDiverged& e) {
      emit(r, out, e.trace());
      throw DataError(e.what());
    }
    emit(r, out, trace);
    if (summary.empty()) return;
    json j;
    j["loss"] = std::string(to_string(cfg.loss));
    j["iterations"] = cfg.iterations;
    j["first_notch_correct"] = trace.first_notch_correct ? json(*trace.first_notch_correct) : json(nullptr);
    j["first_all_correct"] = trace.first_all_correct ? json(*trace.first_all_correct) : json(nullptr);
    j["final_pq"] = trace.final_pq;
    j["final_loss"] = trace.records.back().total;
    write_json(r, summary, j);
  }
};

// ---------------------------------------------------------------------------
// Config files and manifests.

const char* const kSubcommands[] = {"gen-scene", "transform", "loss-eval", "grad-check", "sim-imbalance",
                                    "sim-shrinkwrap", "landscape", "postprocess", "evaluate", "train-toy"};

bool is_subcommand(const std::string& s) {
  for (const char* c : kSubcommands)
    if (s == c) return true;
  return false;
}

std::string scalar_token(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// Appends "--key value..." for every config entry not already given on the
// command line. A manifest (object with a "config" member) is accepted as is.
std::vector<std::string> apply_config(std::vector<std::string> args, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  json cfg = doc.contains("config") ? doc["config"] : doc;
  if (!cfg.is_object()) throw UsageError("config file " + path + " must hold a JSON object");

  bool has_sub = false;
  for (const auto& a : args) has_sub = has_sub || is_subcommand(a);
  if (!has_sub) {
    if (!doc.contains("subcommand")) throw UsageError("config file names no subcommand");
    args.insert(args.begin() + 1, doc["subcommand"].get<std::string>());
  }

  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    bool given = false;
    for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
    if (given) continue;
    if (value.is_array()) {
      args.push_back(flag);
      for (const auto& v : value) args.push_back(scalar_token(v));
    } else {
      args.push_back(flag);
      args.push_back(scalar_token(value));
    }
  }
  return args;
}

json resolved_config(const CLI::App* sub, bool has_seed, std::uint64_t seed) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    std::vector<std::string> vals;
    if (opt->count() > 0) {
      vals = opt->results();
    } else if (!opt->get_default_str().empty()) {
      std::string d = opt->get_default_str();
      if (opt->get_items_expected_max() > 1) {
        if (d.size() >= 2 && d.front() == '[') d = d.substr(1, d.size() - 2);
        std::stringstream ss(d);
        for (std::string item; std::getline(ss, item, ',');) vals.push_back(item);
      } else {
        vals.push_back(d);
      }
    } else {
      continue;
    }
    if (opt->get_items_expected_max() > 1) {
      cfg[name] = vals;
    } else {
      cfg[name] = vals.empty() ? std::string() : vals.front();
    }
  }
  if (has_seed) cfg["seed"] = std::to_string(seed);
  return cfg;
}

void write_manifest(const std::string& sub, const json& config, bool has_seed, std::uint64_t seed, int threads,
                    const Run& run, double wall) {
  if (run.outputs.empty()) return;
  json m;
  m["tool"] = "yseg";
  m["version"] = kVersion;
  m["subcommand"] = sub;
  m["seed"] = has_seed ? json(seed) : json(nullptr);
  m["threads"] = threads;
  m["config"] = config;
  m["inputs"] = run.inputs;
  m["outputs"] = run.outputs;
  m["wall_time_s"] = wall;
  std::ofstream f(run.outputs.front().get<std::string>() + ".manifest.json");
  f << m.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);

  CLI::App app{"Segmentation losses, label transforms and evaluation on synthetic cell scenes", "yseg"};
  app.set_version_flag("--version", kVersion);
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  std::string config_path;
  app.add_option("--threads", threads, "worker threads (0 = runtime default)");
  app.add_option("--config", config_path, "JSON config or manifest; command-line flags win");

  GenScene gen;
  Transform transform;
  LossEval loss_eval;
  GradCheck grad;
  SimImbalance imbalance;
  SimShrinkwrap shrinkwrap;
  Landscape landscape;
  Postprocess post;
  Evaluate evaluate;
  TrainToy train_toy;

  auto* s_gen = app.add_subcommand("gen-scene", "generate a synthetic instance map");
  auto* s_tr = app.add_subcommand("transform", "instance map to semantic ground truth");
  auto* s_le = app.add_subcommand("loss-eval", "evaluate a loss and its gradient norm");
  auto* s_gc = app.add_subcommand("grad-check", "finite-difference gradient check on random instances");
  auto* s_si = app.add_subcommand("sim-imbalance", "random classifiers under class imbalance");
  auto* s_sw = app.add_subcommand("sim-shrinkwrap", "gradient norms along a prescribed shrinking segmentation");
  auto* s_ls = app.add_subcommand("landscape", "loss on a random 2D slice around an optimum");
  auto* s_pp = app.add_subcommand("postprocess", "probability field to instance map");
  auto* s_ev = app.add_subcommand("evaluate", "panoptic scores of predicted instance maps");
  auto* s_tt = app.add_subcommand("train-toy", "gradient descent on per-element logits");

  gen.attach(s_gen);
  transform.attach(s_tr);
  loss_eval.attach(s_le);
  grad.attach(s_gc);
  imbalance.attach(s_si);
  shrinkwrap.attach(s_sw);
  landscape.attach(s_ls);
  post.attach(s_pp);
  evaluate.attach(s_ev);
  train_toy.attach(s_tt);

  std::uint64_t seed = 0;
  for (auto* s : {s_gen, s_gc, s_si, s_ls, s_tt}) s->add_option("--seed", seed, "RNG seed (random when omitted)");

  try {
    for (std::size_t i = 1; i + 1 < args.size(); ++i)
      if (args[i] == "--config") args = apply_config(args, args[i + 1]);
      else if (args[i].rfind("--config=", 0) == 0) args = apply_config(args, args[i].substr(9));
  } catch (const UsageError& e) {
    std::cerr << "yseg: " << e.what() << "\n";
    return 1;
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  const CLI::Option* seed_opt = sub->get_option_no_throw("--seed");
  const bool has_seed = seed_opt != nullptr;
  if (has_seed && seed_opt->count() == 0) seed = std::random_device{}() * 0x100000000ULL + std::random_device{}();

  parallel::set_threads(threads);
  Run run;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (sub == s_gen) gen.run(run, seed);
    else if (sub == s_tr) transform.run(run);
    else if (sub == s_le) loss_eval.run(run);
    else if (sub == s_gc) grad.run(run, seed);
    else if (sub == s_si) imbalance.run(run, seed);
    else if (sub == s_sw) shrinkwrap.run(run);
    else if (sub == s_ls) landscape.run(run, seed);
    else if (sub == s_pp) post.run(run);
    else if (sub == s_ev) evaluate.run(run);
    else train_toy.run(run, seed);
  } catch (const UsageError& e) {
    std::cerr << "yseg " << name << ": " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "yseg " << name << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "yseg " << name << ": " << e.what() << "\n";
    return 2;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(name, resolved_config(sub, has_seed, seed), has_seed, seed, threads, run, wall);
  return 0;
}
