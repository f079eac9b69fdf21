#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "coldpack/csv.hpp"
#include "coldpack/domain.hpp"

namespace coldpack {

// Dataset directory layout: four CSVs plus a JSON manifest naming them.
// All CSVs are UTF-8 with a header row; dates are ISO-8601; money and the
// integer attributes are plain integers; course ratings carry one decimal.
inline constexpr int kDatasetFormatVersion = 1;

inline constexpr const char* kCoursesHeader = "course_id,rating,region";
inline constexpr const char* kPackagesHeader =
    "package_id,course_id,active_from,active_to,play_month,play_dow,"
    "lunch,caddie,competition,holiday,pair_party,min_party_size,min_num_parties,"
    "num_laps,price,promotion_type,shortness";
inline constexpr const char* kBookingsHeader =
    "user_id,course_id,package_id,booked_at,play_date,price_paid,"
    "lunch,caddie,competition,holiday,pair_party,min_party_size,min_num_parties,"
    "num_laps,party_size,num_parties";
inline constexpr const char* kHolidaysHeader = "date";

inline std::string format_rating(double r) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.1f", r);
    return buf;
}

inline void save_dataset(const Dataset& d, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    Dataset sorted = d;
    sort_dataset(sorted);

    {
        std::ofstream out(fs::path(dir) / "courses.csv", std::ios::binary);
        out << kCoursesHeader << '\n';
        for (const auto& c : sorted.courses)
            out << c.id << ',' << format_rating(c.rating) << ',' << c.region << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "packages.csv", std::ios::binary);
        out << kPackagesHeader << '\n';
        for (const auto& p : sorted.packages) {
            const auto& o = p.options;
            out << p.id << ',' << p.course_id << ',' << to_iso(p.active_from) << ','
                << to_iso(p.active_to) << ',' << p.play_month << ',' << p.play_dow << ','
                << o.lunch << ',' << o.caddie << ',' << o.competition << ',' << o.holiday
                << ',' << o.pair_party << ',' << o.min_party_size << ','
                << o.min_num_parties << ',' << o.num_laps << ',' << p.price << ','
                << p.promotion_type << ',' << p.shortness << '\n';
        }
    }
    {
        std::ofstream out(fs::path(dir) / "bookings.csv", std::ios::binary);
        out << kBookingsHeader << '\n';
        for (const auto& b : sorted.bookings) {
            const auto& o = b.options;
            out << b.user_id << ',' << b.course_id << ',' << b.package_id << ','
                << to_iso(b.booked_at) << ',' << to_iso(b.play_date) << ',' << b.price_paid
                << ',' << o.lunch << ',' << o.caddie << ',' << o.competition << ','
                << o.holiday << ',' << o.pair_party << ',' << o.min_party_size << ','
                << o.min_num_parties << ',' << o.num_laps << ',' << b.party_size << ','
                << b.num_parties << '\n';
        }
    }
    {
        std::ofstream out(fs::path(dir) / "holidays.csv", std::ios::binary);
        out << kHolidaysHeader << '\n';
        for (Date h : sorted.holiday_calendar) out << to_iso(h) << '\n';
    }

    nlohmann::json manifest = {
        {"format_version", kDatasetFormatVersion},
        {"files",
         {{"courses", "courses.csv"},
          {"packages", "packages.csv"},
          {"bookings", "bookings.csv"},
          {"holidays", "holidays.csv"}}}};
    std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
}

inline OptionVector parse_option_fields(const std::vector<std::string>& row,
                                        std::size_t first, const std::string& what) {
    OptionVector o;
    o.lunch = static_cast<int>(parse_ll(row[first + 0], what + ".lunch"));
    o.caddie = static_cast<int>(parse_ll(row[first + 1], what + ".caddie"));
    o.competition = static_cast<int>(parse_ll(row[first + 2], what + ".competition"));
    o.holiday = static_cast<int>(parse_ll(row[first + 3], what + ".holiday"));
    o.pair_party = static_cast<int>(parse_ll(row[first + 4], what + ".pair_party"));
    o.min_party_size = static_cast<int>(parse_ll(row[first + 5], what + ".min_party_size"));
    o.min_num_parties = static_cast<int>(parse_ll(row[first + 6], what + ".min_num_parties"));
    o.num_laps = static_cast<int>(parse_ll(row[first + 7], what + ".num_laps"));
    return o;
}

// Loads the dataset named by a manifest (path to manifest.json or to the
// directory containing one). Bookings come back sorted by booked_at.
inline Dataset load_dataset(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    fs::path mpath(manifest_path);
    if (fs::is_directory(mpath)) mpath /= "manifest.json";
    std::ifstream in(mpath);
    if (!in) throw std::runtime_error("cannot open manifest " + mpath.string());
    nlohmann::json manifest = nlohmann::json::parse(in);
    if (manifest.value("format_version", -1) != kDatasetFormatVersion)
        throw std::runtime_error("unsupported dataset format_version in " + mpath.string());
    fs::path dir = mpath.parent_path();
    auto file = [&](const char* key) {
        return (dir / manifest.at("files").at(key).get<std::string>()).string();
    };

    Dataset d;
    {
        CsvTable t = read_csv(file("courses"));
        for (const auto& row : t.rows) {
            Course c;
            c.id = row[0];
            c.rating = parse_double(row[1], "course.rating");
            c.region = row[2];
            d.courses.push_back(std::move(c));
        }
    }
    {
        CsvTable t = read_csv(file("packages"));
        for (const auto& row : t.rows) {
            Package p;
            p.id = row[0];
            p.course_id = row[1];
            p.active_from = parse_iso_date(row[2]);
            p.active_to = parse_iso_date(row[3]);
            p.play_month = static_cast<int>(parse_ll(row[4], "package.play_month"));
            p.play_dow = static_cast<int>(parse_ll(row[5], "package.play_dow"));
            p.options = parse_option_fields(row, 6, "package");
            p.price = parse_ll(row[14], "package.price");
            p.promotion_type = row[15];
            p.shortness = static_cast<int>(parse_ll(row[16], "package.shortness"));
            d.packages.push_back(std::move(p));
        }
    }
    {
        CsvTable t = read_csv(file("bookings"));
        for (const auto& row : t.rows) {
            Booking b;
            b.user_id = row[0];
            b.course_id = row[1];
            b.package_id = row[2];
            b.booked_at = parse_iso_date(row[3]);
            b.play_date = parse_iso_date(row[4]);
            b.price_paid = parse_ll(row[5], "booking.price_paid");
            b.options = parse_option_fields(row, 6, "booking");
            b.party_size = static_cast<int>(parse_ll(row[14], "booking.party_size"));
            b.num_parties = static_cast<int>(parse_ll(row[15], "booking.num_parties"));
            d.bookings.push_back(std::move(b));
        }
    }
    {
        CsvTable t = read_csv(file("holidays"));
        for (const auto& row : t.rows) d.holiday_calendar.insert(parse_iso_date(row[0]));
    }
    sort_dataset(d);
    return d;
}

}  // namespace coldpack
