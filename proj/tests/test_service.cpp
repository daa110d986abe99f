#include <gtest/gtest.h>

#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "dg2pix/service.hpp"
#include "dg2pix/synth.hpp"

using namespace dg2pix;
using nlohmann::json;

namespace {

// Two well separated states over 32 steps: dense 2-block graphs and sparse
// single-block graphs.
std::shared_ptr<const Dataset> make_dataset() {
  StateSpec dense;
  dense.n_blocks = 2;
  dense.nodes_per_block = 10;
  dense.node_jitter = 0;
  dense.p_in = 0.9;
  dense.p_out = 0.0;
  dense.count = 16;
  StateSpec sparse = dense;
  sparse.n_blocks = 1;
  sparse.nodes_per_block = 20;
  sparse.p_in = 0.1;
  SbmConfig c;
  c.states = {dense, sparse};
  c.seed = 5;
  auto data = sbm_dynamic(c);
  const auto h = build_hierarchy(data.graph);
  std::map<Method, EmbeddingMatrix> emb;
  emb[Method::fgsd] = fgsd(h);
  Graph2VecParams p;
  p.epochs = 5;
  p.dimensions = 16;
  emb[Method::graph2vec] = graph2vec(h, p);
  LayoutParams lp;
  lp.iterations = 50;
  auto ds = std::make_shared<Dataset>("sbm", std::move(data.graph), std::move(emb), lp);
  ds->ground_truth = data.labels;
  return ds;
}

std::uint32_t png_width(const std::string& png) {
  const auto* b = reinterpret_cast<const unsigned char*>(png.data()) + 16;
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { dataset_ = make_dataset(); }
  void SetUp() override { service.add_dataset(dataset_); }

  static std::shared_ptr<const Dataset> dataset_;
  Service service;
};

std::shared_ptr<const Dataset> ServiceTest::dataset_;

}  // namespace

TEST_F(ServiceTest, DatasetsAndDefaultView) {
  const auto ds = json::parse(service.datasets_json());
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0]["steps"], 32);
  EXPECT_EQ(ds[0]["supergraphs"], 63);
  EXPECT_EQ(ds[0]["has_ground_truth"], true);
  const auto id = service.create_session("sbm");
  EXPECT_EQ(id, "s1");
  const auto v = json::parse(service.view_json(id));
  EXPECT_EQ(v["bars"].size(), 4u);  // T=32: medium level 3
  EXPECT_EQ(v["method"], "graph2vec");
  EXPECT_THROW(service.create_session("nope"), NotFound);
  EXPECT_THROW(service.view_json("s99"), NotFound);
  EXPECT_THROW(service.create_session("sbm", 0), Error);
}

TEST_F(ServiceTest, MutationsBumpRevisionAndKeepCover) {
  const auto id = service.create_session("sbm");
  auto v = json::parse(service.drill(id, 0));
  EXPECT_EQ(v["bars"].size(), 5u);
  EXPECT_EQ(v["revision"], 1);
  v = json::parse(service.rollup(id, {0, 1}));
  EXPECT_EQ(v["bars"].size(), 4u);
  EXPECT_THROW(service.rollup(id, {1, 2}), Conflict);
  EXPECT_EQ(json::parse(service.view_json(id))["revision"], 2);
  v = json::parse(service.window(id, std::make_pair(0, 8)));
  EXPECT_EQ(v["bars"][1]["visible"], false);
  EXPECT_EQ(json::parse(service.pixels_json(id))["columns"], 1);
  service.window(id, std::nullopt);
  v = json::parse(service.select(id, {1, 2}));
  EXPECT_EQ(v["selected"], (std::vector<int>{1, 2}));
  EXPECT_THROW(service.select(id, {9}), Conflict);
  v = json::parse(service.set_method(id, "fgsd"));
  EXPECT_EQ(v["method"], "fgsd");
  EXPECT_THROW(service.set_method(id, "gl2vec"), NotFound);
  EXPECT_THROW(service.set_method(id, "pca"), Error);
}

TEST_F(ServiceTest, PixelsMatchView) {
  const auto id = service.create_session("sbm", 400, 0);
  const auto j = json::parse(service.pixels_json(id));
  EXPECT_EQ(j["columns"], 32);
  EXPECT_EQ(j["d"], 16);
  const auto png = service.pixels_png(id);
  EXPECT_EQ(png_width(std::string(png.begin(), png.end())), 32u * (400 / 32));
  const auto z = json::parse(service.zoombar_json(id));
  EXPECT_EQ(z["bars"].size(), 32u);
}

TEST_F(ServiceTest, ClusterOrderingAndFrames) {
  const auto id = service.create_session("sbm", 400, 0);
  service.set_method(id, "fgsd");
  const auto c = json::parse(service.cluster(id, 5));
  EXPECT_EQ(c["n_clusters"], 2);
  const auto p = json::parse(service.pixels_json(id));
  EXPECT_EQ(p["frames"].size(), 2u);
  EXPECT_EQ(p["frames"][0]["color"], "#808080");
  const auto truth = *dataset_->ground_truth;
  std::vector<int> labels = c["labels"];
  EXPECT_GT(adjusted_rand_index(labels, truth), 0.9);
  // Zoom bar stays chronological whatever the column order.
  const auto z = json::parse(service.zoombar_json(id));
  for (std::size_t i = 0; i < 32; ++i) EXPECT_EQ(z["bars"][i]["position"], i);
}

TEST_F(ServiceTest, OrderRequests) {
  const auto id = service.create_session("sbm", 400, 0);
  auto v = json::parse(service.order(id, R"({"row_stat":"median","col_mode":"similarity","query":3})"));
  EXPECT_EQ(v["ordering"]["col_mode"], "similarity");
  const auto comp = service.compose(id);
  EXPECT_EQ(comp.positions.front(), 3u);
  EXPECT_THROW(service.order(id, R"({"col_mode":"similarity"})"), Error);
  EXPECT_THROW(service.order(id, R"({"col_mode":"similarity","query":99})"), Conflict);
  EXPECT_THROW(service.order(id, R"({"row_stat":"mode"})"), Error);
}

TEST_F(ServiceTest, GraphPartition) {
  const auto id = service.create_session("sbm");
  const auto g = json::parse(service.graph_json(id, {0, 3}));
  const auto& counts = g["counts"];
  EXPECT_EQ(counts["intersection_nodes"].get<std::size_t>() + counts["disjoint_nodes"].get<std::size_t>(),
            g["nodes"].size());
  EXPECT_EQ(counts["intersection_edges"].get<std::size_t>() + counts["disjoint_edges"].get<std::size_t>(),
            g["edges"].size());
  EXPECT_EQ(g["steps"], 16);
  EXPECT_THROW(service.graph_json(id, {}), Error);
  EXPECT_THROW(service.graph_json(id, {7}), Conflict);
  const auto l = json::parse(service.layout_json("sbm"));
  EXPECT_EQ(l["nodes"].size(), dataset_->graph().node_universe.size());
}

TEST_F(ServiceTest, HttpRoutes) {
  HttpServer server(service);
  const int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen(); });
  httplib::Client cli("127.0.0.1", port);

  auto r = cli.Get("/datasets");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);

  r = cli.Post("/sessions", R"({"dataset":"sbm"})", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 201);
  const std::string sid = json::parse(r->body)["session"];

  r = cli.Get("/sessions/" + sid + "/pixels");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(png_width(r->body), 4u * 100);

  r = cli.Post("/sessions/" + sid + "/cluster", R"({"min_cluster_size":2})", "application/json");
  EXPECT_EQ(r->status, 200);
  r = cli.Get("/sessions/" + sid + "/pixels", {{"Accept", "application/json"}});
  EXPECT_EQ(json::parse(r->body)["columns"], 4);

  EXPECT_EQ(cli.Get("/sessions/nope/view")->status, 404);
  EXPECT_EQ(cli.Get("/datasets/nope/layout")->status, 404);
  r = cli.Post("/sessions", R"({"dataset":"missing"})", "application/json");
  EXPECT_EQ(r->status, 404);
  r = cli.Post("/sessions/" + sid + "/rollup", R"({"bars":[1,2]})", "application/json");
  EXPECT_EQ(r->status, 409);
  EXPECT_NE(json::parse(r->body)["error"].get<std::string>().find("parent"), std::string::npos);
  r = cli.Post("/sessions/" + sid + "/drill", "{not json", "application/json");
  EXPECT_EQ(r->status, 400);
  r = cli.Post("/sessions/" + sid + "/drill", R"({"bar":0})", "application/json");
  EXPECT_EQ(json::parse(r->body)["bars"].size(), 5u);
  r = cli.Post("/sessions/" + sid + "/window", R"({"t0":0,"t1":4})", "application/json");
  EXPECT_EQ(r->status, 200);
  r = cli.Post("/sessions/" + sid + "/window", R"({"clear":true})", "application/json");
  EXPECT_EQ(r->status, 200);
  r = cli.Post("/sessions/" + sid + "/order", R"({"row_stat":"variance"})", "application/json");
  EXPECT_EQ(r->status, 200);
  r = cli.Post("/sessions/" + sid + "/method", R"({"method":"fgsd"})", "application/json");
  EXPECT_EQ(r->status, 200);
  r = cli.Post("/sessions/" + sid + "/select", R"({"bars":[0]})", "application/json");
  EXPECT_EQ(r->status, 200);
  r = cli.Get("/sessions/" + sid + "/zoombar");
  EXPECT_EQ(json::parse(r->body)["bars"].size(), 5u);
  r = cli.Get("/sessions/" + sid + "/zoombar?format=png");
  EXPECT_EQ(r->get_header_value("Content-Type"), "image/png");
  r = cli.Get("/sessions/" + sid + "/graph?bars=0,1");
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(cli.Get("/sessions/" + sid + "/graph?bars=0,x")->status, 400);
  EXPECT_EQ(cli.Get("/sessions/" + sid + "/graph")->status, 400);
  EXPECT_EQ(cli.Get("/datasets/sbm/layout")->status, 200);

  server.stop();
  t.join();
}
