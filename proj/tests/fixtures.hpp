#pragma once

#include <string>
#include <vector>

#include "coldpack/domain.hpp"

namespace coldpack::test {

inline Course make_course(const Id& id, double rating = 4.0, const Id& region = "R0") {
    return Course{id, rating, region};
}

inline Package make_package(const Id& id, const Id& course, Date from, int lifespan_days,
                            OptionVector options = {}, Money price = 10000,
                            const std::string& promo = "none") {
    Package p;
    p.id = id;
    p.course_id = course;
    p.active_from = from;
    p.active_to = from.plus_days(lifespan_days);
    p.shortness = lifespan_days;
    Date mid = from.plus_days(lifespan_days / 2);
    p.play_month = month_of(mid);
    p.play_dow = weekday_iso(mid);
    p.options = options;
    p.price = price;
    p.promotion_type = promo;
    return p;
}

inline Booking make_booking(const Id& user, const Package& pkg, Date booked_at,
                            Money price_paid = -1, int party_size = 2, int num_parties = 1) {
    Booking b;
    b.user_id = user;
    b.course_id = pkg.course_id;
    b.package_id = pkg.id;
    b.booked_at = booked_at;
    b.play_date = pkg.active_from.plus_days(pkg.shortness / 2);
    b.price_paid = price_paid < 0 ? pkg.price : price_paid;
    b.options = pkg.options;
    b.party_size = party_size;
    b.num_parties = num_parties;
    return b;
}

// Two users, two courses, four valid bookings.
inline Dataset small_fixture() {
    Dataset d;
    d.courses = {make_course("CA", 4.2), make_course("CB", 3.6, "R1")};
    d.packages = {
        make_package("PA1", "CA", make_date(2013, 4, 1), 20, {1, 0, 0, 0, 0, 1, 1, 1}, 9000),
        make_package("PA2", "CA", make_date(2013, 5, 1), 25, {0, 1, 0, 1, 0, 1, 1, 1}, 12000),
        make_package("PB1", "CB", make_date(2013, 5, 10), 10, {1, 0, 1, 0, 1, 2, 1, 1}, 8000),
    };
    d.bookings = {
        make_booking("U1", d.packages[0], make_date(2013, 4, 2)),
        make_booking("U1", d.packages[1], make_date(2013, 5, 3)),
        make_booking("U2", d.packages[0], make_date(2013, 4, 5)),
        make_booking("U2", d.packages[2], make_date(2013, 5, 12)),
    };
    sort_dataset(d);
    return d;
}

}  // namespace coldpack::test
