// Command-line driver: complete missing labels in a relational event
// stream, score completions, generate synthetic streams and inspect cache
// snapshots.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "relabel/relabel.hpp"

namespace {

using namespace relabel;

// Query atom renderings (negation stripped) to labels, restricted to one
// predicate; `unknown` collects the '?'-prefixed ones.
std::map<std::string, int> collect_labels(const std::vector<MicroBatch>& batches,
                                          std::set<std::string>* unknown = nullptr) {
  std::map<std::string, int> out;
  for (const auto& b : batches)
    for (const auto& [q, label] : b.query_atoms) {
      if (label == Label::Unknown) {
        if (unknown) unknown->insert(render(q));
        continue;
      }
      out[render(q)] = label == Label::Positive ? 1 : -1;
    }
  return out;
}

void print_metrics(const Metrics& m) {
  std::cout << "  evaluated  " << m.evaluated() << "\n"
            << "  tp " << m.tp << "  fp " << m.fp << "  tn " << m.tn << "  fn " << m.fn << "\n"
            << "  precision  " << m.precision << "\n"
            << "  recall     " << m.recall << "\n"
            << "  f1         " << m.f1 << "\n";
  std::cout << "tp=" << m.tp << " fp=" << m.fp << " tn=" << m.tn << " fn=" << m.fn
            << " precision=" << m.precision << " recall=" << m.recall << " f1=" << m.f1
            << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Online label completion for relational event streams"};
  app.require_subcommand(1);

  // ---- complete ----
  auto* complete = app.add_subcommand("complete", "Complete missing labels in a stream");
  std::vector<std::string> inputs;
  std::string decls_path, query_pred, output_path, annotation_path;
  std::string cache_in, cache_out, weights_out;
  int knn_k = 2;
  double enn_eps = 0.75;
  double delta = 0.0001;
  bool use_enn = false;
  complete->add_option("-i,--input", inputs, "Stream file(s) or batch directories")->required();
  complete->add_option("-d,--decls", decls_path, "Declarations file")->required();
  complete->add_option("-q,--query", query_pred, "Query predicate name")->required();
  complete->add_option("-o,--output", output_path, "Completed stream output file")->required();
  complete->add_option("-k,--knn", knn_k, "kNN connection heuristic (default)");
  auto* enn_opt = complete->add_option("-e,--enn", enn_eps, "eNN similarity threshold");
  complete->add_option("--delta", delta, "Hoeffding confidence delta");
  complete->add_option("--annotation", annotation_path, "Ground truth stream for scoring");
  complete->add_option("--load-cache", cache_in, "Warm-start cache snapshot");
  complete->add_option("--save-cache", cache_out, "Write final cache snapshot");
  complete->add_option("--dump-weights", weights_out,
                       "Append each batch's sparsified weight matrix to this file");

  // ---- evaluate ----
  auto* eval = app.add_subcommand("evaluate", "Score a completed stream against ground truth");
  std::string ev_input, ev_completed, ev_truth, ev_decls, ev_query;
  eval->add_option("-i,--input", ev_input, "Original (partially labelled) stream")->required();
  eval->add_option("-c,--completed", ev_completed, "Completed stream")->required();
  eval->add_option("-t,--truth", ev_truth, "Ground truth stream")->required();
  eval->add_option("-d,--decls", ev_decls, "Declarations file")->required();
  eval->add_option("-q,--query", ev_query, "Query predicate name")->required();

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "Generate a synthetic stream with known truth");
  std::string gen_dir = ".";
  GeneratorParams params;
  int placement_whole = 1;
  gen->add_option("-o,--out-dir", gen_dir, "Output directory");
  gen->add_option("--seed", params.seed, "Random seed");
  gen->add_option("--batches", params.batches, "Number of micro-batches");
  gen->add_option("--batch-size", params.batch_size, "Query atoms per batch");
  gen->add_option("--entities", params.entities, "Entity pool size");
  gen->add_option("--label-fraction", params.label_fraction, "Fraction of labels retained");
  gen->add_option("--whole-batch", placement_whole,
                  "1: whole batches labelled/unlabelled; 0: per-batch hiding");
  gen->add_option("--positive-rate", params.positive_rate, "Positive query probability");
  gen->add_option("--rule", params.rule, "Target rule: move or meet");

  // ---- dump-cache / load-cache ----
  auto* dump = app.add_subcommand("dump-cache", "Pretty-print a cache snapshot");
  std::string dump_cache_path, dump_decls_path;
  dump->add_option("--cache", dump_cache_path, "Cache snapshot file")->required();
  dump->add_option("-d,--decls", dump_decls_path, "Declarations file")->required();

  auto* load = app.add_subcommand("load-cache", "Validate a cache snapshot");
  std::string load_cache_path, load_decls_path;
  load->add_option("--cache", load_cache_path, "Cache snapshot file")->required();
  load->add_option("-d,--decls", load_decls_path, "Declarations file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (complete->parsed()) {
    if (knn_k < 1 || delta <= 0.0 || delta >= 1.0 || enn_eps < 0.0 || enn_eps > 1.0)
      throw ConfigError("invalid parameters: require k >= 1, delta in (0,1), epsilon in [0,1]");
    use_enn = enn_opt->count() > 0;

    Declarations decls = load_declarations(decls_path);
    if (!decls.schema.predicates.count(query_pred))
      throw ConfigError("query predicate has no signature: " + query_pred);

    StreamState state;
    state.config.connector = use_enn ? Connector::Enn : Connector::Knn;
    state.config.k = knn_k;
    state.config.epsilon = enn_eps;
    state.config.delta = delta;
    state.config.query_predicate = query_pred;
    state.config.schema = decls.schema;
    state.config.modes = decls.modes;
    std::ofstream weights_os;
    if (!weights_out.empty()) {
      weights_os.open(weights_out);
      if (!weights_os) throw ConfigError("cannot open weights output: " + weights_out);
      state.config.on_weights = [&weights_os](const WeightMatrix& w) {
        dump_weights(w, weights_os);
        weights_os << "---\n";
      };
    }
    if (!cache_in.empty()) {
      std::ifstream in(cache_in);
      if (!in) throw ConfigError("cannot open cache snapshot: " + cache_in);
      state.cache = load_cache(in, decls.schema, cache_in);
    }

    auto batches = ingest(inputs, decls, query_pred);
    auto completed = run_stream(batches, state, &std::cerr);
    emit_completed(completed, output_path);

    if (!cache_out.empty()) {
      std::ofstream os(cache_out);
      if (!os) throw ConfigError("cannot open cache output: " + cache_out);
      save_cache(state.cache, os);
    }

    const auto& s = state.summary;
    std::cout << "batches=" << s.batches << " queries=" << s.query_atoms
              << " labelled=" << s.labelled_given << " completed=" << s.completed
              << " evidence=" << s.evidence_atoms << " cache=" << s.cache_entries
              << " filtered=" << s.filtered_out << "\n";

    if (!annotation_path.empty()) {
      auto truth_batches = ingest({annotation_path}, decls, query_pred);
      auto truth = collect_labels(truth_batches);
      std::set<std::string> unknown;
      collect_labels(batches, &unknown);
      std::map<std::string, int> predicted;
      for (const auto& batch : completed)
        for (const auto& c : batch)
          if (!c.given) predicted[render(c.atom)] = c.label;
      print_metrics(evaluate(predicted, truth, unknown));
    }
    return 0;
  }

  if (eval->parsed()) {
    Declarations decls = load_declarations(ev_decls);
    auto original = ingest({ev_input}, decls, ev_query);
    std::set<std::string> unknown;
    collect_labels(original, &unknown);
    auto predicted = collect_labels(ingest({ev_completed}, decls, ev_query));
    auto truth = collect_labels(ingest({ev_truth}, decls, ev_query));
    print_metrics(evaluate(predicted, truth, unknown));
    return 0;
  }

  if (gen->parsed()) {
    params.placement = placement_whole ? Placement::WholeBatch : Placement::PerBatch;
    SyntheticStream s = synth_gen(params);
    namespace fs = std::filesystem;
    fs::create_directories(gen_dir);
    auto write = [&](const std::string& name, const std::string& content) {
      std::ofstream os(fs::path(gen_dir) / name);
      if (!os) throw ConfigError("cannot write " + name + " in " + gen_dir);
      os << content;
    };
    write("stream.txt", s.stream_text);
    write("truth.txt", s.truth_text);
    write("decls.txt", s.declarations);
    std::cout << "wrote stream.txt, truth.txt, decls.txt to " << gen_dir << "\n";
    return 0;
  }

  if (dump->parsed() || load->parsed()) {
    const std::string& cpath = dump->parsed() ? dump_cache_path : load_cache_path;
    const std::string& dpath = dump->parsed() ? dump_decls_path : load_decls_path;
    Declarations decls = load_declarations(dpath);
    std::ifstream in(cpath);
    if (!in) throw ConfigError("cannot open cache snapshot: " + cpath);
    LabelCache cache = load_cache(in, decls.schema, cpath);
    if (dump->parsed()) {
      for (const auto& e : cache.entries)
        std::cout << e.count << "\t" << e.clause.rendering << "\n";
    }
    std::cout << "entries=" << cache.size() << "\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const relabel::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const relabel::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const relabel::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
