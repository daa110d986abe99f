// dg2pix: ingest, synthesize, embed, render and serve dynamic graphs.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dg2pix/dyngraph.hpp"
#include "dg2pix/embed.hpp"
#include "dg2pix/render.hpp"
#include "dg2pix/service.hpp"
#include "dg2pix/synth.hpp"
#include "dg2pix/view.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dg2pix;

namespace {

// --config wins, then $DG2PIX_CONFIG, then ./dg2pix.json when present.
json load_config(const std::string& flag) {
  std::string path = flag;
  if (path.empty())
    if (const char* env = std::getenv("DG2PIX_CONFIG")) path = env;
  if (path.empty() && fs::exists("dg2pix.json")) path = "dg2pix.json";
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw Error("cannot read config '" + path + "'");
  return json::parse(in);
}

json section(const json& config, const char* name) {
  return config.contains(name) ? config.at(name) : json::object();
}

struct IngestFlags {
  bool timed = false;
  std::int64_t bucket = 3600;

  IngestConfig config() const {
    IngestConfig c;
    c.mode = timed ? IngestConfig::Mode::timed : IngestConfig::Mode::indexed;
    c.bucket_seconds = bucket;
    return c;
  }
};

void add_ingest_flags(CLI::App* app, IngestFlags& f) {
  app->add_flag("--timed", f.timed, "Treat t as Unix seconds and bucket it");
  app->add_option("--bucket", f.bucket, "Bucket width in seconds for --timed")->capture_default_str();
}

struct EmbedFlags {
  std::string method = "graph2vec";
  std::size_t dims = 128;
  int epochs = 1000;
  double lr = 0.02;
  int wl = 2;
  int negatives = 5;
  std::size_t min_count = 5;
  double sample = 1e-4;
  std::uint64_t seed = 42;
  int bins = 128;
  double range = 20.0;
  bool parallel_train = false;

  void apply(const json& cfg) {
    method = cfg.value("method", method);
    dims = cfg.value("dims", dims);
    epochs = cfg.value("epochs", epochs);
    lr = cfg.value("lr", lr);
    wl = cfg.value("wl", wl);
    negatives = cfg.value("negatives", negatives);
    min_count = cfg.value("min_count", min_count);
    sample = cfg.value("sample", sample);
    seed = cfg.value("seed", seed);
    bins = cfg.value("bins", bins);
    range = cfg.value("range", range);
  }
};

EmbeddingMatrix compute_embedding(const MultiscaleHierarchy& h, const EmbedFlags& f) {
  const auto method = parse_method(f.method);
  if (method == Method::fgsd) {
    FgsdParams p;
    p.bins = f.bins;
    p.range_max = f.range;
    return fgsd(h, p);
  }
  Graph2VecParams p;
  p.dimensions = f.dims;
  p.epochs = f.epochs;
  p.learning_rate = f.lr;
  p.wl_iterations = f.wl;
  p.negatives = f.negatives;
  p.min_count = f.min_count;
  p.sample = f.sample;
  p.seed = f.seed;
  p.train_exec = f.parallel_train ? Exec::parallel : Exec::serial;
  return method == Method::gl2vec ? gl2vec(h, p) : graph2vec(h, p);
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dg2pix: multiscale dynamic graph embeddings and pixel summaries"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (default: $DG2PIX_CONFIG)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse an edge list and write the multiscale hierarchy");
  std::string ingest_in, ingest_out, ingest_export;
  IngestFlags ingest_flags;
  ingest->add_option("input", ingest_in, "Edge list t,src,dst[,weight[,sign]]")->required();
  ingest->add_option("-o,--output", ingest_out, "Binary hierarchy file");
  ingest->add_option("--export", ingest_export, "Re-export the bucketed edge list");
  add_ingest_flags(ingest, ingest_flags);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dynamic graph");
  synth->require_subcommand(1);
  auto* sbm = synth->add_subcommand("sbm", "Block model with 2/3/4-block temporal states");
  std::string sbm_out, sbm_truth, sbm_scale = "desk";
  std::uint64_t sbm_seed = 42;
  bool sbm_ordered = false;
  sbm->add_option("-o,--output", sbm_out, "Edge list to write")->required();
  sbm->add_option("--truth", sbm_truth, "Ground-truth labels and config (JSON)");
  sbm->add_option("--scale", sbm_scale, "desk (90 nodes, 120 steps) or paper (1000 nodes, 1000 steps)")
      ->check(CLI::IsMember({"desk", "paper"}))
      ->capture_default_str();
  sbm->add_option("--seed", sbm_seed)->capture_default_str();
  sbm->add_flag("--no-shuffle", sbm_ordered, "Keep the states in blocks of consecutive steps");
  auto* ws = synth->add_subcommand("ws", "Connected Watts-Strogatz graph per step");
  std::string ws_out, ws_truth;
  WsConfig ws_cfg;
  ws->add_option("-o,--output", ws_out)->required();
  ws->add_option("--truth", ws_truth, "Generator config (JSON)");
  ws->add_option("--steps", ws_cfg.steps)->capture_default_str();
  ws->add_option("--nodes", ws_cfg.nodes)->capture_default_str();
  ws->add_option("--k-min", ws_cfg.k_min)->capture_default_str();
  ws->add_option("--k-max", ws_cfg.k_max)->capture_default_str();
  ws->add_option("--p", ws_cfg.p_rewire, "Rewiring probability")->capture_default_str();
  ws->add_option("--seed", ws_cfg.seed)->capture_default_str();

  // embed
  auto* embed = app.add_subcommand("embed", "Embed every supergraph of the hierarchy");
  std::string embed_in, embed_out, embed_csv;
  IngestFlags embed_ingest;
  EmbedFlags ef;
  embed->add_option("input", embed_in, "Edge list")->required();
  embed->add_option("-o,--output", embed_out, "Embedding manifest (JSON + .f32 sidecar)")->required();
  embed->add_option("--csv", embed_csv, "Also export a CSV");
  embed->add_option("--method", ef.method)->check(CLI::IsMember({"graph2vec", "gl2vec", "fgsd"}));
  embed->add_option("--dims", ef.dims);
  embed->add_option("--epochs", ef.epochs);
  embed->add_option("--lr", ef.lr);
  embed->add_option("--wl", ef.wl);
  embed->add_option("--negatives", ef.negatives);
  embed->add_option("--min-count", ef.min_count, "Drop words seen fewer times across all documents");
  embed->add_option("--sample", ef.sample, "Frequent-word downsampling threshold, 0 disables");
  embed->add_option("--seed", ef.seed);
  embed->add_option("--bins", ef.bins);
  embed->add_option("--range", ef.range);
  embed->add_flag("--parallel-train", ef.parallel_train, "Hogwild training (not bit-reproducible)");
  add_ingest_flags(embed, embed_ingest);

  // render
  auto* render = app.add_subcommand("render", "Render the pixel view of one cut");
  std::string render_in, render_emb, render_out, render_json, row_stat = "none", col_mode = "time";
  std::optional<std::uint32_t> render_level;
  std::size_t render_cap = 0, render_mcs = 5;
  int render_segments = 1;
  IngestFlags render_ingest;
  render->add_option("input", render_in, "Edge list")->required();
  render->add_option("--embeddings", render_emb, "Embedding manifest")->required();
  render->add_option("-o,--output", render_out, "PNG to write")->required();
  render->add_option("--json", render_json, "Also write the class matrix");
  render->add_option("--level", render_level, "Uniform level (default: the medium level)");
  render->add_option("--screen", render_cap, "Screen width in pixels (default 400)");
  render->add_option("--segments", render_segments, "Color segments per side");
  render->add_option("--row-stat", row_stat)->check(CLI::IsMember({"none", "median", "mean", "min", "max", "variance", "std"}));
  render->add_option("--col-mode", col_mode)->check(CLI::IsMember({"time", "cluster"}));
  render->add_option("--min-cluster-size", render_mcs);
  add_ingest_flags(render, render_ingest);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve datasets over HTTP");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::vector<std::string> serve_inputs;
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--dataset", serve_inputs, "id=edges.csv[,manifest.json...] (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    const json config = load_config(config_path);

    if (*ingest) {
      const auto g = ingest_edge_list_file(ingest_in, ingest_flags.config());
      const auto h = build_hierarchy(g);
      std::cout << "steps " << g.steps() << ", nodes " << g.node_universe.size() << ", levels " << h.top_level() + 1
                << ", supergraphs " << h.total_count() << '\n';
      if (!ingest_out.empty()) {
        std::ofstream out(ingest_out, std::ios::binary);
        if (!out) throw Error("cannot write '" + ingest_out + "'");
        write_hierarchy(out, h);
      }
      if (!ingest_export.empty()) {
        std::ofstream out(ingest_export);
        export_edge_list(out, g);
      }
    } else if (*sbm) {
      auto cfg = sbm_scale == "paper" ? paper_sbm_config(sbm_seed) : desk_sbm_config(sbm_seed);
      cfg.shuffle = !sbm_ordered;
      const auto data = sbm_dynamic(cfg);
      std::ofstream out(sbm_out);
      if (!out) throw Error("cannot write '" + sbm_out + "'");
      export_edge_list(out, data.graph);
      if (!sbm_truth.empty()) write_text(sbm_truth, to_json(cfg, data.labels));
      std::cout << "wrote " << data.graph.steps() << " steps to " << sbm_out << '\n';
    } else if (*ws) {
      const auto g = ws_dynamic(ws_cfg);
      std::ofstream out(ws_out);
      if (!out) throw Error("cannot write '" + ws_out + "'");
      export_edge_list(out, g);
      if (!ws_truth.empty()) write_text(ws_truth, to_json(ws_cfg));
      std::cout << "wrote " << g.steps() << " steps to " << ws_out << '\n';
    } else if (*embed) {
      EmbedFlags merged;
      merged.apply(section(config, "embed"));
      // Explicit flags beat the config file.
      for (const auto* opt : embed->get_options()) {
        if (opt->count() == 0) continue;
        const auto& n = opt->get_name();
        if (n == "--method") merged.method = ef.method;
        else if (n == "--dims") merged.dims = ef.dims;
        else if (n == "--epochs") merged.epochs = ef.epochs;
        else if (n == "--lr") merged.lr = ef.lr;
        else if (n == "--wl") merged.wl = ef.wl;
        else if (n == "--negatives") merged.negatives = ef.negatives;
        else if (n == "--min-count") merged.min_count = ef.min_count;
        else if (n == "--sample") merged.sample = ef.sample;
        else if (n == "--seed") merged.seed = ef.seed;
        else if (n == "--bins") merged.bins = ef.bins;
        else if (n == "--range") merged.range = ef.range;
      }
      merged.parallel_train = ef.parallel_train;
      const auto g = ingest_edge_list_file(embed_in, embed_ingest.config());
      const auto h = build_hierarchy(g);
      const auto m = compute_embedding(h, merged);
      save_embeddings(m, embed_out);
      if (!embed_csv.empty()) {
        std::ofstream out(embed_csv);
        export_embeddings_csv(out, m);
      }
      std::cout << "embedded " << m.rows.size() << " supergraphs with " << to_string(m.method) << " (d=" << m.dimensions
                << ")\n";
    } else if (*render) {
      const auto g = ingest_edge_list_file(render_in, render_ingest.config());
      const auto m = load_embeddings(render_emb);
      std::map<Method, EmbeddingMatrix> embs;
      embs.emplace(m.method, m);
      ServiceConfig sc;
      sc.screen_width_px = render_cap ? render_cap : section(config, "render").value("screen_width_px", kDefaultBarCap);
      sc.segments_per_side = render_segments;
      Service svc(sc);
      svc.add_dataset(std::make_shared<Dataset>("input", g, std::move(embs)));
      const auto sid = svc.create_session("input", std::nullopt, render_level);
      svc.order(sid, json{{"row_stat", row_stat}, {"col_mode", "time"}}.dump());
      if (col_mode == "cluster") svc.cluster(sid, render_mcs);
      write_bytes(render_out, svc.pixels_png(sid));
      if (!render_json.empty()) write_text(render_json, svc.pixels_json(sid));
      std::cout << "wrote " << render_out << '\n';
    } else if (*serve) {
      const auto scfg = section(config, "serve");
      ServiceConfig sc;
      sc.screen_width_px = scfg.value("screen_width_px", kDefaultBarCap);
      sc.segments_per_side = scfg.value("segments_per_side", 1);
      Service svc(sc);
      std::vector<json> entries;
      if (scfg.contains("datasets"))
        for (const auto& d : scfg.at("datasets")) entries.push_back(d);
      for (const auto& spec : serve_inputs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw Error("--dataset expects id=edges.csv[,manifest.json...]");
        json entry{{"id", spec.substr(0, eq)}};
        std::stringstream parts(spec.substr(eq + 1));
        std::string item;
        std::getline(parts, item, ',');
        entry["edges"] = item;
        entry["embeddings"] = json::array();
        while (std::getline(parts, item, ',')) entry["embeddings"].push_back(item);
        entries.push_back(entry);
      }
      if (entries.empty()) throw Error("no datasets configured");
      for (const auto& e : entries) {
        IngestFlags f;
        f.timed = e.value("timed", false);
        f.bucket = e.value("bucket_seconds", std::int64_t{3600});
        auto g = ingest_edge_list_file(e.at("edges").get<std::string>(), f.config());
        std::map<Method, EmbeddingMatrix> embs;
        for (const auto& path : e.value("embeddings", json::array())) {
          auto m = load_embeddings(path.get<std::string>());
          embs.emplace(m.method, std::move(m));
        }
        if (embs.empty()) {
          const auto h = build_hierarchy(g);
          for (const auto& name : e.value("compute", json::array({"graph2vec"}))) {
            EmbedFlags ef2;
            ef2.apply(section(config, "embed"));
            ef2.method = name.get<std::string>();
            auto m = compute_embedding(h, ef2);
            embs.emplace(m.method, std::move(m));
          }
        }
        auto ds = std::make_shared<Dataset>(e.at("id").get<std::string>(), std::move(g), std::move(embs));
        svc.add_dataset(ds);
        std::cout << "dataset " << ds->id() << ": " << ds->graph().steps() << " steps\n";
      }
      HttpServer server(svc);
      port = scfg.contains("port") && serve->get_option("--port")->count() == 0 ? scfg.at("port").get<int>() : port;
      const int bound = server.bind(host, port);
      std::cout << "listening on http://" << host << ':' << bound << std::endl;
      server.listen();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
