#include <json.hpp>

#include "haur/dataset.hpp"
#include "haur/error.hpp"

namespace haur {

namespace {

using Json = nlohmann::ordered_json;

Json rgb_json(Rgb c) { return Json::array({c.r, c.g, c.b}); }

Rgb rgb_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::Parse, "color must be [r, g, b]");
  return {j[0].get<std::uint8_t>(), j[1].get<std::uint8_t>(), j[2].get<std::uint8_t>()};
}

Json span_json(Span s) { return Json::array({s.begin, s.end}); }

Span span_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::Parse, "span must be [begin, end]");
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

Json target_json(const Target& t) {
  if (const auto* s = std::get_if<SentenceTarget>(&t)) {
    return Json{{"type", "sentence"}, {"index", s->sentence}};
  }
  if (const auto* p = std::get_if<ParagraphTarget>(&t)) {
    return Json{{"type", "paragraph"}, {"index", p->paragraph}};
  }
  const auto& span = std::get<TokenSpanTarget>(t).span;
  return Json{{"type", "token_span"}, {"span", span_json(span)}};
}

Target target_from(const Json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "sentence") return SentenceTarget{j.at("index").get<std::size_t>()};
  if (type == "paragraph") return ParagraphTarget{j.at("index").get<std::size_t>()};
  if (type == "token_span") return TokenSpanTarget{span_from(j.at("span"))};
  throw Error(ErrorCode::Parse, "unknown target type " + type);
}

Json render_json(const RenderConfig& c) {
  return Json{{"page_width_px", c.page_width_px},
              {"margin_px", c.margin_px},
              {"font_size_px", c.font_size_px},
              {"line_height_px", c.line_height_px},
              {"paragraph_gap_px", c.paragraph_gap_px},
              {"paragraph_indent_px", c.paragraph_indent_px},
              {"foreground", rgb_json(c.foreground)},
              {"background", rgb_json(c.background)}};
}

RenderConfig render_from(const Json& j) {
  RenderConfig c;
  c.page_width_px = j.at("page_width_px").get<int>();
  c.margin_px = j.at("margin_px").get<int>();
  c.font_size_px = j.at("font_size_px").get<int>();
  c.line_height_px = j.at("line_height_px").get<int>();
  c.paragraph_gap_px = j.at("paragraph_gap_px").get<int>();
  c.paragraph_indent_px = j.at("paragraph_indent_px").get<int>();
  c.foreground = rgb_from(j.at("foreground"));
  c.background = rgb_from(j.at("background"));
  return c;
}

Json sample_json(const SampleManifest& s) {
  return Json{{"sample_id", s.sample_id},
              {"doc_id", s.doc_id},
              {"chunk_id", s.chunk_id},
              {"kind", to_string(s.kind)},
              {"target", target_json(s.target)},
              {"ground_truth", s.ground_truth},
              {"full_text", s.full_text},
              {"noise",
               {{"applied", s.noise.applied},
                {"lead_chars", s.noise.lead_chars},
                {"trail_chars", s.noise.trail_chars}}},
              {"clean_span", span_json(s.clean_span)},
              {"noised_span", span_json(s.noised_span)},
              {"seed", s.seed},
              {"render_config_digest", s.render_config_digest},
              {"image_path", s.image_path},
              {"crop_offset", Json::array({s.crop_offset_x, s.crop_offset_y})}};
}

SampleManifest sample_from(const Json& j) {
  SampleManifest s;
  s.sample_id = j.at("sample_id").get<std::string>();
  s.doc_id = j.at("doc_id").get<std::string>();
  s.chunk_id = j.at("chunk_id").get<std::string>();
  s.kind = parse_kind(j.at("kind").get<std::string>());
  s.target = target_from(j.at("target"));
  s.ground_truth = j.at("ground_truth").get<std::string>();
  s.full_text = j.at("full_text").get<std::string>();
  const auto& n = j.at("noise");
  s.noise.applied = n.at("applied").get<bool>();
  s.noise.lead_chars = n.at("lead_chars").get<std::size_t>();
  s.noise.trail_chars = n.at("trail_chars").get<std::size_t>();
  s.clean_span = span_from(j.at("clean_span"));
  s.noised_span = span_from(j.at("noised_span"));
  s.seed = j.at("seed").get<std::uint64_t>();
  s.render_config_digest = j.at("render_config_digest").get<std::string>();
  s.image_path = j.at("image_path").get<std::string>();
  const auto& off = j.at("crop_offset");
  s.crop_offset_x = off.at(0).get<int>();
  s.crop_offset_y = off.at(1).get<int>();
  return s;
}

}  // namespace

std::string manifest_to_json(const DatasetManifest& m) {
  Json j;
  j["schema"] = kManifestSchema;
  j["dataset_id"] = m.dataset_id;
  j["creation_seed"] = m.creation_seed;
  j["token_definition"] = "whitespace";
  j["offset_unit"] = "utf8_byte";
  j["noise_length_unit"] = "code_point";
  j["paragraph_separator"] = std::string(1, kParagraphSeparator);
  j["render_config"] = render_json(m.params.render);
  j["render_config_digest"] = m.params.render.digest();
  j["noise"] = {{"probability", m.params.noise.probability},
                {"max_chars", m.params.noise.max_chars}};
  j["max_tokens"] = m.max_tokens;
  j["crop_margin_px"] = m.params.crop_margin_px;
  j["quota"] = m.quota;
  j["counts"] = m.counts;
  j["warnings"] = m.warnings;
  Json samples = Json::array();
  for (const auto& s : m.samples) samples.push_back(sample_json(s));
  j["samples"] = std::move(samples);
  if (m.split_seed) {
    j["split"] = {{"seed", *m.split_seed},
                  {"ratios", m.split_ratios},
                  {"assignment", m.split}};
  } else {
    j["split"] = nullptr;
  }
  return j.dump(1) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
  try {
    const auto j = Json::parse(text);
    if (j.at("schema").get<int>() != kManifestSchema) {
      throw Error(ErrorCode::Parse, "unsupported manifest schema");
    }
    DatasetManifest m;
    m.dataset_id = j.at("dataset_id").get<std::string>();
    m.creation_seed = j.at("creation_seed").get<std::uint64_t>();
    m.params.render = render_from(j.at("render_config"));
    m.params.noise.probability = j.at("noise").at("probability").get<double>();
    m.params.noise.max_chars = j.at("noise").at("max_chars").get<std::size_t>();
    m.params.crop_margin_px = j.at("crop_margin_px").get<int>();
    m.max_tokens = j.at("max_tokens").get<std::size_t>();
    m.quota = j.at("quota").get<std::size_t>();
    m.counts = j.at("counts").get<std::map<std::string, std::size_t>>();
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& s : j.at("samples")) m.samples.push_back(sample_from(s));
    const auto& split = j.at("split");
    if (!split.is_null()) {
      m.split_seed = split.at("seed").get<std::uint64_t>();
      m.split_ratios = split.at("ratios").get<std::array<double, 3>>();
      m.split = split.at("assignment").get<std::map<std::string, std::string>>();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("manifest: ") + e.what());
  }
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  const auto text = manifest_to_json(manifest);
  write_file_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return manifest_from_json({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
}

}  // namespace haur
