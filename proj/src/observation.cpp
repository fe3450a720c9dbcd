#include "streamasp/observation.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

#include "streamasp/error.hpp"

namespace streamasp::obs {

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return ec == std::errc();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

Instant parse_instant(std::string_view text) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  auto bad = [&]() -> Instant { throw std::invalid_argument("invalid ISO-8601 timestamp '" + std::string(text) + "'"); };
  if (text.size() < 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
      text[13] != ':' || text[16] != ':') {
    return bad();
  }
  if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo) || !read_int(text, 8, 2, d) ||
      !read_int(text, 11, 2, h) || !read_int(text, 14, 2, mi) || !read_int(text, 17, 2, sec)) {
    return bad();
  }
  std::size_t pos = 19;
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int scale = 100;
    std::size_t digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      millis += (text[pos] - '0') * scale;
      scale /= 10;
      ++pos;
      ++digits;
    }
    if (digits == 0) return bad();
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) return bad();

  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) return bad();
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} + milliseconds{millis};
}

std::string format_instant(Instant t) {
  using namespace std::chrono;
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss<milliseconds> clock{t - day_point};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(clock.hours().count()), static_cast<int>(clock.minutes().count()),
                static_cast<int>(clock.seconds().count()));
  std::string out = buf;
  if (auto ms = clock.subseconds().count(); ms != 0) {
    std::snprintf(buf, sizeof buf, ".%03d", static_cast<int>(ms));
    out += buf;
  }
  return out;
}

Step to_timestep(Instant ts, Instant origin, std::int64_t granularity_seconds) {
  if (granularity_seconds <= 0) throw std::invalid_argument("granularity must be positive");
  if (ts < origin) {
    throw std::invalid_argument("timestamp " + format_instant(ts) + " precedes the stream origin " +
                                format_instant(origin));
  }
  const auto elapsed = (ts - origin).count();  // milliseconds, non-negative
  const Step step = elapsed / (granularity_seconds * 1000);
  return step < 1 ? 1 : step;
}

const std::string& classify(double value, const kb::SensorDecl& sensor) {
  for (const auto& r : sensor.ranges) {
    if (r.contains(value)) return r.state;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", value);
  throw ClassificationError("value " + std::string(buf) + " of sensor '" + sensor.id + "' is in no declared range");
}

std::string_view classify(double value, const kb::TargetDecl& target) {
  return target.normal_min <= value && value <= target.normal_max ? kb::kNormal : kb::kAbnormal;
}

const std::string* StateTracker::last(std::string_view object, std::string_view attribute) const {
  auto it = states_.find(std::pair<std::string, std::string>(object, attribute));
  return it == states_.end() ? nullptr : &it->second;
}

void StateTracker::set(const std::string& object, const std::string& attribute, const std::string& state) {
  states_[{object, attribute}] = state;
}

Reading read(const SensorSample& sample, const kb::KnowledgeBase& kb) {
  if (sample.sensor_id == kb.target.sensor) {
    return {kb.target.instance, kb.target.attribute, std::string(classify(sample.value, kb.target))};
  }
  if (const kb::SensorDecl* sensor = kb.sensor(sample.sensor_id)) {
    return {sensor->object, sensor->attribute, classify(sample.value, *sensor)};
  }
  throw ValidationError("unknown sensor '" + sample.sensor_id + "'");
}

std::optional<Manifestation> detect(const SensorSample& sample, StateTracker& tracker, const kb::KnowledgeBase& kb,
                                    Instant origin, std::int64_t granularity_seconds) {
  Reading r = read(sample, kb);
  const std::string* last = tracker.last(r.object, r.attribute);
  if (last && *last == r.state) return std::nullopt;
  Step step = to_timestep(sample.timestamp, origin, granularity_seconds);
  tracker.set(r.object, r.attribute, r.state);
  return Manifestation{std::move(r.object), std::move(r.attribute), std::move(r.state), step};
}

std::vector<SensorSample> parse_samples_csv(std::string_view text) {
  std::vector<SensorSample> out;
  std::size_t line_no = 0;
  bool header = false;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!header) {
      if (line != "timestamp,sensorId,value") {
        throw ParseError("expected header 'timestamp,sensorId,value'", line_no, 1);
      }
      header = true;
      continue;
    }
    std::size_t c1 = line.find(',');
    std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError("expected three comma-separated fields", line_no, 1);
    }
    SensorSample s;
    try {
      s.timestamp = parse_instant(trim(line.substr(0, c1)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no, 1);
    }
    s.sensor_id = std::string(trim(line.substr(c1 + 1, c2 - c1 - 1)));
    if (!kb::is_identifier(s.sensor_id)) throw ParseError("invalid sensor id '" + s.sensor_id + "'", line_no, c1 + 2);
    std::string_view value = trim(line.substr(c2 + 1));
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), s.value);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw ParseError("invalid value '" + std::string(value) + "'", line_no, c2 + 2);
    }
    if (!out.empty() && s.timestamp < out.back().timestamp) {
      throw ParseError("samples are not sorted by timestamp", line_no, 1);
    }
    out.push_back(std::move(s));
  }
  if (!header) throw ParseError("missing header 'timestamp,sensorId,value'", 1, 1);
  return out;
}

std::string format_samples_csv(const std::vector<SensorSample>& samples) {
  std::string out = "timestamp,sensorId,value\n";
  char buf[64];
  for (const auto& s : samples) {
    std::snprintf(buf, sizeof buf, "%.10g", s.value);
    out += format_instant(s.timestamp) + "," + s.sensor_id + "," + buf + "\n";
  }
  return out;
}

}  // namespace streamasp::obs
