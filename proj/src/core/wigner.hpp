#pragma once

// Wigner 3j/6j symbols via the Racah closed forms with log-factorial
// summation. Half-integer arguments are supported; selection-rule violations
// return exactly zero.

namespace pulselab {

double wigner_3j(double j1, double j2, double j3, double m1, double m2,
                 double m3);

double wigner_6j(double j1, double j2, double j3, double j4, double j5,
                 double j6);

// Clebsch-Gordan coefficient <j1 m1 j2 m2 | j3 m3>.
double clebsch_gordan(double j1, double m1, double j2, double m2, double j3,
                      double m3);

}  // namespace pulselab
