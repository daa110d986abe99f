#include <algorithm>

#include "json.hpp"

#include "dg2pix/service.hpp"

namespace dg2pix {

using nlohmann::json;

Dataset::Dataset(std::string id, DynamicGraph graph, std::map<Method, EmbeddingMatrix> embeddings,
                 LayoutParams layout)
    : id_(std::move(id)),
      graph_(std::move(graph)),
      hierarchy_(build_hierarchy(graph_)),
      embeddings_(std::move(embeddings)),
      layout_params_(layout) {
  if (embeddings_.empty()) throw Error("dataset " + id_ + " has no embeddings");
  const auto keys = hierarchy_.keys();
  for (const auto& [method, m] : embeddings_) {
    if (m.method != method) throw Error("embedding registered under the wrong method");
    for (const auto& k : keys)
      if (!m.find(k)) throw Error(to_string(method) + " embedding lacks interval " + to_string(k));
  }
}

const EmbeddingMatrix& Dataset::embedding(Method m) const {
  auto it = embeddings_.find(m);
  if (it == embeddings_.end()) throw NotFound("dataset " + id_ + " has no " + to_string(m) + " embedding");
  return it->second;
}

const Layout& Dataset::layout() const {
  std::call_once(layout_once_, [this] { layout_ = std::make_unique<Layout>(fr_layout(global(), layout_params_)); });
  return *layout_;
}

// ---------------------------------------------------------------------------

namespace {

json interval_json(IntervalId iv, std::uint64_t steps) {
  return {{"level", iv.level}, {"start", iv.start}, {"first_step", iv.first_step()}, {"end_step", iv.end_step(steps)}};
}

std::optional<IntervalId> parse_query(const json& q, const ViewCut& view) {
  if (q.is_null()) return std::nullopt;
  if (q.is_number_unsigned() || q.is_number_integer()) {
    const auto p = q.get<std::int64_t>();
    if (p < 0 || static_cast<std::size_t>(p) >= view.bars.size())
      throw Conflict("query bar " + std::to_string(p) + " does not exist");
    return view.bars[static_cast<std::size_t>(p)];
  }
  if (q.is_object()) return IntervalId{q.at("level").get<std::uint32_t>(), q.at("start").get<std::uint64_t>()};
  throw Error("query must be a bar position or {level, start}");
}

}  // namespace

Service::Service(ServiceConfig config) : config_(config) {
  if (config_.screen_width_px == 0 || config_.screen_width_px > kMaxBarCap)
    throw Error("screen width must be in [1, " + std::to_string(kMaxBarCap) + "]");
}

void Service::add_dataset(std::shared_ptr<const Dataset> dataset) {
  std::unique_lock lock(mutex_);
  datasets_[dataset->id()] = std::move(dataset);
}

std::shared_ptr<const Dataset> Service::dataset(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = datasets_.find(id);
  if (it == datasets_.end()) throw NotFound("unknown dataset " + id);
  return it->second;
}

std::shared_ptr<Session> Service::session(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session " + id);
  return it->second;
}

std::string Service::datasets_json() const {
  std::shared_lock lock(mutex_);
  json out = json::array();
  for (const auto& [id, d] : datasets_) {
    json methods = json::array();
    for (const auto& [m, e] : d->embeddings()) methods.push_back({{"method", to_string(m)}, {"d", e.dimensions}});
    std::size_t nodes = 0, edges = 0;
    for (const auto& s : d->graph().snapshots) edges += s.edges.size();
    nodes = d->graph().node_universe.size();
    out.push_back({{"id", id},
                   {"steps", d->graph().steps()},
                   {"top_level", d->hierarchy().top_level()},
                   {"supergraphs", d->hierarchy().total_count()},
                   {"nodes", nodes},
                   {"edges", edges},
                   {"methods", methods},
                   {"has_ground_truth", d->ground_truth.has_value()}});
  }
  return out.dump();
}

std::string Service::create_session(const std::string& dataset_id, std::optional<std::size_t> screen_width_px,
                                    std::optional<std::uint32_t> level) {
  auto ds = dataset(dataset_id);
  const auto cap = screen_width_px.value_or(config_.screen_width_px);
  if (cap == 0 || cap > kMaxBarCap) throw Error("screen width must be in [1, " + std::to_string(kMaxBarCap) + "]");
  auto s = std::make_shared<Session>();
  s->dataset = ds;
  s->view = level ? uniform_view(ds->graph().steps(), *level, cap) : default_view(ds->graph().steps(), cap);
  s->method = ds->embeddings().count(Method::graph2vec) ? Method::graph2vec : ds->embeddings().begin()->first;
  std::unique_lock lock(mutex_);
  s->id = "s" + std::to_string(next_session_++);
  sessions_[s->id] = s;
  return s->id;
}

std::string Service::view_json_locked(const Session& s) const {
  const auto& v = s.view;
  const auto visible = visible_positions(v);
  std::vector<char> shown(v.bars.size(), 0);
  for (auto p : visible) shown[p] = 1;
  json bars = json::array();
  for (std::size_t p = 0; p < v.bars.size(); ++p) {
    auto b = interval_json(v.bars[p], v.steps);
    b["position"] = p;
    b["visible"] = static_cast<bool>(shown[p]);
    bars.push_back(std::move(b));
  }
  json ordering{{"row_stat", to_string(s.ordering.row_stat)}, {"col_mode", to_string(s.ordering.col_mode)}};
  ordering["query"] = s.ordering.similarity_query ? json{{"level", s.ordering.similarity_query->level},
                                                          {"start", s.ordering.similarity_query->start}}
                                                    : json(nullptr);
  return json{{"session", s.id},
              {"dataset", s.dataset->id()},
              {"steps", v.steps},
              {"top_level", top_level(v.steps)},
              {"screen_width_px", v.screen_width_px},
              {"revision", s.revision},
              {"method", to_string(s.method)},
              {"ordering", ordering},
              {"min_cluster_size", s.min_cluster_size},
              {"window", v.window ? json{v.window->first, v.window->second} : json(nullptr)},
              {"selected", s.selected},
              {"bars", bars}}
      .dump();
}

std::string Service::view_json(const std::string& id) const {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  return view_json_locked(*s);
}

void Service::commit(Session& s, ViewCut next) const {
  validate_cover(next);
  if (s.ordering.similarity_query) {
    const auto& bars = next.bars;
    if (std::find(bars.begin(), bars.end(), *s.ordering.similarity_query) == bars.end()) {
      s.ordering.similarity_query.reset();
      s.ordering.col_mode = ColMode::time;
    }
  }
  s.view = std::move(next);
  s.selected.clear();
  s.clusters.reset();
  ++s.revision;
}

std::string Service::drill(const std::string& id, std::size_t bar) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  commit(*s, dg2pix::drill(s->view, bar));
  return view_json_locked(*s);
}

std::string Service::rollup(const std::string& id, const std::vector<std::size_t>& bars) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  commit(*s, dg2pix::rollup(s->view, bars));
  return view_json_locked(*s);
}

std::string Service::window(const std::string& id, std::optional<std::pair<std::uint64_t, std::uint64_t>> range) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  commit(*s, range ? set_window(s->view, range->first, range->second) : clear_window(s->view));
  return view_json_locked(*s);
}

std::string Service::order(const std::string& id, const std::string& body) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  const json req = json::parse(body.empty() ? "{}" : body);
  OrderingSpec spec = s->ordering;
  if (req.contains("row_stat")) spec.row_stat = parse_row_stat(req.at("row_stat").get<std::string>());
  if (req.contains("col_mode")) spec.col_mode = parse_col_mode(req.at("col_mode").get<std::string>());
  spec.similarity_query.reset();
  if (spec.col_mode == ColMode::similarity) {
    spec.similarity_query = parse_query(req.value("query", json(nullptr)), s->view);
    if (!spec.similarity_query) throw Error("similarity ordering needs a query bar");
    const auto visible = visible_positions(s->view);
    const bool shown = std::any_of(visible.begin(), visible.end(),
                                   [&](std::size_t p) { return s->view.bars[p] == *spec.similarity_query; });
    if (!shown) throw Conflict("query " + to_string(*spec.similarity_query) + " is not a visible bar");
  }
  spec.validate();
  s->ordering = spec;
  ++s->revision;
  return view_json_locked(*s);
}

std::string Service::cluster(const std::string& id, std::size_t min_cluster_size) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  if (min_cluster_size < 2) throw Error("min_cluster_size must be at least 2");
  s->min_cluster_size = min_cluster_size;
  s->clusters.reset();
  s->ordering.col_mode = ColMode::cluster;
  s->ordering.similarity_query.reset();
  ++s->revision;
  const auto comp = compose_locked(*s);
  json labels = json::array();
  for (std::size_t i = 0; i < comp.clusters->labels.size(); ++i) labels.push_back(comp.clusters->labels[i]);
  const auto visible = visible_positions(s->view);
  return json{{"revision", s->revision},
              {"positions", visible},
              {"labels", labels},
              {"n_clusters", comp.clusters->n_clusters},
              {"stability", comp.clusters->stability},
              {"min_cluster_size", comp.clusters->min_cluster_size},
              {"min_samples", comp.clusters->min_samples}}
      .dump();
}

std::string Service::set_method(const std::string& id, const std::string& method) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  const auto m = parse_method(method);
  s->dataset->embedding(m);
  if (m != s->method) {
    s->method = m;
    s->clusters.reset();
    ++s->revision;
  }
  return view_json_locked(*s);
}

std::string Service::select(const std::string& id, const std::vector<std::size_t>& bars) {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  for (auto b : bars)
    if (b >= s->view.bars.size()) throw Conflict("bar " + std::to_string(b) + " does not exist");
  s->selected = {bars.begin(), bars.end()};
  ++s->revision;
  return view_json_locked(*s);
}

Composition Service::compose_locked(Session& s) const {
  const auto& matrix = s.dataset->embedding(s.method);
  Composition out;
  const auto visible = visible_positions(s.view);
  std::vector<std::span<const double>> raw, normalized;
  std::vector<Column> columns;
  for (auto p : visible) {
    const auto& e = matrix.at(s.view.bars[p]);
    raw.emplace_back(e.raw);
    normalized.emplace_back(e.normalized);
    columns.push_back({e.key, e.normalized});
  }
  const ClusterResult* clusters = nullptr;
  if (s.ordering.col_mode == ColMode::cluster) {
    if (!s.clusters) {
      HdbscanParams params;
      params.min_cluster_size = s.min_cluster_size;
      s.clusters = hdbscan(normalized, params);
    }
    clusters = &*s.clusters;
    out.clusters = s.clusters;
  }
  const auto rows = row_order(raw, s.ordering.row_stat);
  const auto cols = col_order(columns, s.ordering.col_mode, clusters, s.ordering.similarity_query);
  std::vector<ColumnGroup> frames;
  for (const auto& g : cols.groups)
    if (g.label >= 0) frames.push_back(g);
  RenderOptions opts;
  opts.segments_per_side = config_.segments_per_side;
  opts.screen_width_px = s.view.screen_width_px;
  opts.cell_height_px = config_.cell_height_px;
  out.image = render_pixels(raw, rows, cols.order, frames, opts);
  for (auto c : cols.order) out.positions.push_back(visible[c]);
  return out;
}

Composition Service::compose(const std::string& id) const {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  return compose_locked(*s);
}

std::string Service::pixels_json(const std::string& id) const {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  const auto comp = compose_locked(*s);
  json j = json::parse(class_matrix_json(comp.image));
  json bars = json::array();
  for (auto p : comp.positions) {
    auto b = interval_json(s->view.bars[p], s->view.steps);
    b["position"] = p;
    bars.push_back(std::move(b));
  }
  j["bars"] = std::move(bars);
  j["revision"] = s->revision;
  j["method"] = to_string(s->method);
  j["width_px"] = comp.image.width_px;
  j["height_px"] = comp.image.height_px;
  return j.dump();
}

std::vector<std::uint8_t> Service::pixels_png(const std::string& id) const { return compose(id).image.png; }

ZoomBar Service::zoombar_locked(const Session& s) const {
  const auto visible = visible_positions(s.view);
  std::vector<IntervalId> shown;
  for (auto p : visible) shown.push_back(s.view.bars[p]);
  const auto width = std::max<std::size_t>(1, s.view.screen_width_px / shown.size());
  return render_zoom_bar(shown, s.view.steps, width, config_.zoom_height_px);
}

std::string Service::zoombar_json(const std::string& id) const {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  json j = json::parse(zoom_bar_json(zoombar_locked(*s)));
  const auto visible = visible_positions(s->view);
  for (std::size_t i = 0; i < j["bars"].size(); ++i) j["bars"][i]["position"] = visible[i];
  j["revision"] = s->revision;
  return j.dump();
}

std::vector<std::uint8_t> Service::zoombar_png(const std::string& id) const {
  auto s = session(id);
  std::lock_guard lock(s->mutex);
  return zoombar_locked(*s).png;
}

std::string Service::graph_json(const std::string& id, const std::vector<std::size_t>& bars) const {
  auto s = session(id);
  std::vector<const Supergraph*> graphs;
  {
    std::lock_guard lock(s->mutex);
    if (bars.empty()) throw Error("graph view needs at least one bar");
    for (auto b : bars) {
      if (b >= s->view.bars.size()) throw Conflict("bar " + std::to_string(b) + " does not exist");
      graphs.push_back(&s->dataset->hierarchy().at(s->view.bars[b]));
    }
  }
  const auto& ds = *s->dataset;
  const auto cmp = compare_supergraphs(graphs, ds.graph().steps());
  if (cmp.intersection_nodes + cmp.disjoint_nodes != cmp.union_graph.nodes.size() ||
      cmp.intersection_edges + cmp.disjoint_edges != cmp.union_graph.edges.size())
    throw Error("graph comparison classes do not partition the union");
  const auto& layout = ds.layout();
  json nodes = json::array(), edges = json::array();
  for (std::size_t i = 0; i < cmp.union_graph.nodes.size(); ++i) {
    const auto& n = cmp.union_graph.nodes[i];
    const auto pos = layout.position(n.id).value_or(std::array<double, 2>{0.5, 0.5});
    nodes.push_back({{"id", n.id}, {"presence", n.count}, {"class", to_string(cmp.node_class[i])},
                     {"x", pos[0]}, {"y", pos[1]}});
  }
  for (std::size_t i = 0; i < cmp.union_graph.edges.size(); ++i) {
    const auto& e = cmp.union_graph.edges[i];
    edges.push_back({{"u", e.id.u}, {"v", e.id.v}, {"presence", e.count}, {"class", to_string(cmp.edge_class[i])}});
  }
  return json{{"bars", bars},
              {"steps", cmp.steps.size()},
              {"nodes", nodes},
              {"edges", edges},
              {"counts",
               {{"intersection_nodes", cmp.intersection_nodes},
                {"disjoint_nodes", cmp.disjoint_nodes},
                {"intersection_edges", cmp.intersection_edges},
                {"disjoint_edges", cmp.disjoint_edges}}}}
      .dump();
}

std::string Service::layout_json(const std::string& dataset_id) const {
  const auto ds = dataset(dataset_id);
  const auto& layout = ds->layout();
  json nodes = json::array();
  for (std::size_t i = 0; i < layout.nodes.size(); ++i)
    nodes.push_back({{"id", layout.nodes[i]}, {"x", layout.positions[i][0]}, {"y", layout.positions[i][1]}});
  return json{{"dataset", dataset_id}, {"seed", layout.seed}, {"iterations", layout.iterations}, {"nodes", nodes}}
      .dump();
}

}  // namespace dg2pix
