#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "dg2pix/analytics.hpp"
#include "dg2pix/dyngraph.hpp"
#include "dg2pix/embed.hpp"
#include "dg2pix/render.hpp"
#include "dg2pix/view.hpp"

namespace dg2pix {

/// Immutable once registered; shared across sessions.
class Dataset {
 public:
  Dataset(std::string id, DynamicGraph graph, std::map<Method, EmbeddingMatrix> embeddings,
          LayoutParams layout = {});

  const std::string& id() const { return id_; }
  const DynamicGraph& graph() const { return graph_; }
  const MultiscaleHierarchy& hierarchy() const { return hierarchy_; }
  const std::map<Method, EmbeddingMatrix>& embeddings() const { return embeddings_; }
  const EmbeddingMatrix& embedding(Method m) const;
  /// Supergraph of the whole timeline.
  const Supergraph& global() const { return hierarchy_.at({hierarchy_.top_level(), 0}); }
  /// Computed on first use.
  const Layout& layout() const;

  std::optional<std::vector<int>> ground_truth;

 private:
  std::string id_;
  DynamicGraph graph_;
  MultiscaleHierarchy hierarchy_;
  std::map<Method, EmbeddingMatrix> embeddings_;
  LayoutParams layout_params_;
  mutable std::once_flag layout_once_;
  mutable std::unique_ptr<Layout> layout_;
};

struct ServiceConfig {
  std::size_t screen_width_px = kDefaultBarCap;
  int segments_per_side = 1;
  std::size_t cell_height_px = 2;
  std::size_t zoom_height_px = 32;
};

struct Session {
  std::string id;
  std::shared_ptr<const Dataset> dataset;
  ViewCut view;
  Method method = Method::graph2vec;
  OrderingSpec ordering;
  std::set<std::size_t> selected;
  std::size_t min_cluster_size = 5;
  std::uint64_t revision = 0;
  std::optional<ClusterResult> clusters;  // over the visible bars of `view`
  std::mutex mutex;
};

/// Displayed matrix for one session: visible bars in display order.
struct Composition {
  std::vector<std::size_t> positions;  // view positions, display order
  PixelImage image;
  std::optional<ClusterResult> clusters;
};

/// All mutations validate the resulting cover. Errors: NotFound for unknown
/// ids, Conflict for invalid mutations, Error for malformed arguments.
class Service {
 public:
  explicit Service(ServiceConfig config = {});

  void add_dataset(std::shared_ptr<const Dataset> dataset);
  std::shared_ptr<const Dataset> dataset(const std::string& id) const;

  std::string datasets_json() const;
  /// Starts at the default view, or a uniform cut at `level` when given.
  std::string create_session(const std::string& dataset_id, std::optional<std::size_t> screen_width_px = {},
                             std::optional<std::uint32_t> level = {});

  std::string view_json(const std::string& session) const;
  std::string drill(const std::string& session, std::size_t bar);
  std::string rollup(const std::string& session, const std::vector<std::size_t>& bars);
  std::string window(const std::string& session, std::optional<std::pair<std::uint64_t, std::uint64_t>> range);
  std::string order(const std::string& session, const std::string& body);
  std::string cluster(const std::string& session, std::size_t min_cluster_size);
  std::string set_method(const std::string& session, const std::string& method);
  std::string select(const std::string& session, const std::vector<std::size_t>& bars);

  Composition compose(const std::string& session) const;
  std::string pixels_json(const std::string& session) const;
  std::vector<std::uint8_t> pixels_png(const std::string& session) const;
  std::string zoombar_json(const std::string& session) const;
  std::vector<std::uint8_t> zoombar_png(const std::string& session) const;
  std::string graph_json(const std::string& session, const std::vector<std::size_t>& bars) const;
  std::string layout_json(const std::string& dataset_id) const;

  const ServiceConfig& config() const { return config_; }

 private:
  std::shared_ptr<Session> session(const std::string& id) const;
  std::string view_json_locked(const Session& s) const;
  void commit(Session& s, ViewCut next) const;
  Composition compose_locked(Session& s) const;
  ZoomBar zoombar_locked(const Session& s) const;

  ServiceConfig config_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const Dataset>> datasets_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 1;
};

/// REST front end over a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Binds to `port` (0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called from another thread.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dg2pix
