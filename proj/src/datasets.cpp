#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "sdf/errors.hpp"
#include "sdf/streams.hpp"

namespace sdf {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Splits on commas outside single or double quotes.
std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    char quote = 0;
    for (char ch : line) {
        if (quote) {
            if (ch == quote) quote = 0;
            field.push_back(ch);
        } else if (ch == '"' || ch == '\'') {
            quote = ch;
            field.push_back(ch);
        } else if (ch == ',') {
            out.push_back(unquote(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    out.push_back(unquote(field));
    return out;
}

// Locale-independent; the whole field must be consumed.
bool parse_double(const std::string& text, double& value) {
    if (text.empty()) return false;
    const char* first = text.data();
    if (*first == '+') ++first;
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last;
}

// Numeric-looking values sort numerically, the rest lexicographically.
void sort_values(std::vector<std::string>& values) {
    std::sort(values.begin(), values.end(), [](const std::string& a, const std::string& b) {
        double x = 0, y = 0;
        const bool na = parse_double(a, x);
        const bool nb = parse_double(b, y);
        if (na && nb) return x < y;
        if (na != nb) return na;
        return a < b;
    });
}

class BufferedStream final : public Stream {
public:
    BufferedStream(Schema schema, std::vector<Instance> rows) : schema_(std::move(schema)), rows_(std::move(rows)) {}
    const Schema& schema() const override { return schema_; }
    std::optional<Instance> next() override {
        if (pos_ >= rows_.size()) return std::nullopt;
        return std::move(rows_[pos_++]);
    }

private:
    Schema schema_;
    std::vector<Instance> rows_;
    std::size_t pos_ = 0;
};

// Two passes over the buffered rows: infer per-column kinds, then encode.
std::unique_ptr<Stream> load_csv(const std::string& path, const DatasetOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset '" + path + "'");
    std::string line;
    std::size_t number = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++number;
        if (!trim(line).empty()) header = split_fields(line);
    }
    if (header.empty()) throw SchemaError("'" + path + "' has no header line");
    const std::string class_name = options.class_column.value_or("class");
    const auto class_it = std::find(header.begin(), header.end(), class_name);
    if (class_it == header.end()) throw SchemaError("'" + path + "' has no class column '" + class_name + "'");
    const std::size_t class_col = static_cast<std::size_t>(class_it - header.begin());

    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != header.size())
            throw DataError("expected " + std::to_string(header.size()) + " fields, found " +
                                std::to_string(fields.size()),
                            number);
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (fields[i].empty() || fields[i] == "?") throw DataError("missing value in column '" + header[i] + "'", number);
        rows.push_back(std::move(fields));
        lines.push_back(number);
    }

    const std::size_t cols = header.size();
    std::vector<bool> numeric(cols, true);
    std::vector<std::vector<std::string>> distinct(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        std::map<std::string, int> seen;
        double tmp = 0;
        for (const auto& row : rows) {
            if (numeric[c] && !parse_double(row[c], tmp)) numeric[c] = false;
            seen.emplace(row[c], 0);
        }
        for (auto& [v, _] : seen) distinct[c].push_back(v);
        sort_values(distinct[c]);
    }

    std::vector<Feature> features;
    std::vector<std::map<std::string, int>> index(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t i = 0; i < distinct[c].size(); ++i) index[c][distinct[c][i]] = static_cast<int>(i);
        if (c == class_col) continue;
        features.push_back(numeric[c] ? Feature::numeric(header[c]) : Feature::nominal(header[c], distinct[c]));
    }
    std::string relation = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
    Schema schema(relation, std::move(features), distinct[class_col]);

    std::vector<Instance> instances;
    instances.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Instance inst;
        for (std::size_t c = 0; c < cols; ++c) {
            if (c == class_col) {
                inst.y = index[c].at(rows[r][c]);
                continue;
            }
            double v = 0;
            if (numeric[c]) {
                parse_double(rows[r][c], v);
            } else {
                v = index[c].at(rows[r][c]);
            }
            inst.x.push_back(v);
        }
        instances.push_back(std::move(inst));
    }
    return std::make_unique<BufferedStream>(std::move(schema), std::move(instances));
}

struct ArffAttribute {
    std::string name;
    bool nominal = false;
    std::vector<std::string> values;
    std::map<std::string, int> index;
};

class ArffStream final : public Stream {
public:
    ArffStream(const std::string& path, const DatasetOptions& options) : in_(path) {
        if (!in_) throw DataError("cannot open dataset '" + path + "'");
        std::string relation = "arff";
        std::string line;
        bool data = false;
        while (!data && std::getline(in_, line)) {
            ++line_;
            const std::string t = trim(line);
            if (t.empty() || t.front() == '%') continue;
            const std::string key = lower(t.substr(0, t.find_first_of(" \t")));
            if (key == "@relation") {
                relation = unquote(t.substr(key.size()));
            } else if (key == "@attribute") {
                attributes_.push_back(parse_attribute(t.substr(key.size())));
            } else if (key == "@data") {
                data = true;
            } else {
                throw SchemaError("line " + std::to_string(line_) + ": unexpected header line '" + t + "'");
            }
        }
        if (!data) throw SchemaError("'" + path + "' has no @data section");
        if (attributes_.empty()) throw SchemaError("'" + path + "' declares no attributes");

        if (options.class_column) {
            auto it = std::find_if(attributes_.begin(), attributes_.end(),
                                   [&](const ArffAttribute& a) { return a.name == *options.class_column; });
            if (it == attributes_.end())
                throw SchemaError("'" + path + "' has no class attribute '" + *options.class_column + "'");
            class_index_ = static_cast<std::size_t>(it - attributes_.begin());
        } else {
            auto it = std::find_if(attributes_.begin(), attributes_.end(),
                                   [](const ArffAttribute& a) { return lower(a.name) == "class"; });
            class_index_ = it != attributes_.end() ? static_cast<std::size_t>(it - attributes_.begin())
                                                   : attributes_.size() - 1;
        }
        if (!attributes_[class_index_].nominal)
            throw SchemaError("class attribute '" + attributes_[class_index_].name + "' must be nominal");

        std::vector<Feature> features;
        for (std::size_t i = 0; i < attributes_.size(); ++i) {
            if (i == class_index_) continue;
            const auto& a = attributes_[i];
            features.push_back(a.nominal ? Feature::nominal(a.name, a.values) : Feature::numeric(a.name));
        }
        schema_ = Schema(relation, std::move(features), attributes_[class_index_].values);
    }

    const Schema& schema() const override { return schema_; }

    std::optional<Instance> next() override {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            const std::string t = trim(line);
            if (t.empty() || t.front() == '%') continue;
            if (t.front() == '{') throw DataError("sparse ARFF rows are not supported", line_);
            const auto fields = split_fields(t);
            if (fields.size() != attributes_.size())
                throw DataError("expected " + std::to_string(attributes_.size()) + " values, found " +
                                    std::to_string(fields.size()),
                                line_);
            Instance inst;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const auto& a = attributes_[i];
                if (fields[i].empty() || fields[i] == "?")
                    throw DataError("missing value for attribute '" + a.name + "'", line_);
                double v = 0;
                if (a.nominal) {
                    const auto it = a.index.find(fields[i]);
                    if (it == a.index.end())
                        throw DataError("unknown value '" + fields[i] + "' for nominal attribute '" + a.name + "'",
                                        line_);
                    v = it->second;
                } else if (!parse_double(fields[i], v)) {
                    throw DataError("cannot parse '" + fields[i] + "' as a number for attribute '" + a.name + "'",
                                    line_);
                }
                if (i == class_index_) {
                    inst.y = static_cast<int>(v);
                } else {
                    inst.x.push_back(v);
                }
            }
            return inst;
        }
        if (in_.bad()) throw std::runtime_error("read error after line " + std::to_string(line_));
        return std::nullopt;
    }

private:
    ArffAttribute parse_attribute(const std::string& rest) {
        std::string s = trim(rest);
        ArffAttribute a;
        std::size_t pos = 0;
        if (!s.empty() && (s.front() == '\'' || s.front() == '"')) {
            const auto close = s.find(s.front(), 1);
            if (close == std::string::npos) throw SchemaError("line " + std::to_string(line_) + ": unterminated name");
            a.name = s.substr(1, close - 1);
            pos = close + 1;
        } else {
            pos = s.find_first_of(" \t{");
            if (pos == std::string::npos) throw SchemaError("line " + std::to_string(line_) + ": attribute without type");
            a.name = s.substr(0, pos);
        }
        const std::string type = trim(s.substr(pos));
        if (!type.empty() && type.front() == '{') {
            const auto close = type.rfind('}');
            if (close == std::string::npos) throw SchemaError("line " + std::to_string(line_) + ": unterminated value set");
            a.nominal = true;
            for (auto& v : split_fields(type.substr(1, close - 1))) {
                if (v.empty()) continue;
                a.index.emplace(v, static_cast<int>(a.values.size()));
                a.values.push_back(v);
            }
            if (a.values.empty())
                throw SchemaError("line " + std::to_string(line_) + ": empty value set for '" + a.name + "'");
            return a;
        }
        const std::string t = lower(type);
        if (t == "numeric" || t == "real" || t == "integer") return a;
        throw SchemaError("line " + std::to_string(line_) + ": unsupported attribute type '" + type + "'");
    }

    std::ifstream in_;
    std::size_t line_ = 0;
    std::vector<ArffAttribute> attributes_;
    std::size_t class_index_ = 0;
    Schema schema_;
};

}  // namespace

DatasetFormat format_from_path(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : lower(path.substr(dot + 1));
    if (ext == "arff") return DatasetFormat::arff;
    if (ext == "csv") return DatasetFormat::csv;
    throw ConfigError("format", "cannot infer dataset format from '" + path + "'");
}

std::unique_ptr<Stream> load_dataset(const std::string& path, DatasetFormat format, const DatasetOptions& options) {
    if (format == DatasetFormat::csv) return load_csv(path, options);
    return std::make_unique<ArffStream>(path, options);
}

}  // namespace sdf
