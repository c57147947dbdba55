/* Exercises the shared library through its C header only. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "adiamorse/adiamorse.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static int near(double a, double b, double tol) { return fabs(a - b) <= tol; }

static void paths(void) {
  am_path* g = NULL;
  double re[4], im[4], ev[2];
  EXPECT(am_path_grover(4, 0, &g) == AM_OK);
  EXPECT(am_path_dim(g) == 2);
  EXPECT(am_path_evaluate(g, 0.0, re, im) == AM_OK);
  EXPECT(near(re[0], 0.75, 1e-15) && near(re[1], -0.375, 1e-15));
  EXPECT(near(re[2], -0.5, 1e-15) && near(re[3], 0.25, 1e-15));
  EXPECT(im[0] == 0.0);
  EXPECT(am_path_eigenvalues(g, 0.5, ev) == AM_OK);
  EXPECT(near(ev[1] - ev[0], 0.5, 1e-12));
  EXPECT(am_path_evaluate(g, 2.0, re, NULL) == AM_DOMAIN_ERROR);
  EXPECT(strlen(am_last_error()) > 0);
  am_path_free(g);

  EXPECT(am_path_grover(6, 0, &g) == AM_INVALID_ARGUMENT);
  EXPECT(am_path_pspin(3, 2, 1.5, 2, &g) == AM_INVALID_ARGUMENT);
  EXPECT(am_path_grover(4, 0, NULL) == AM_INVALID_ARGUMENT);

  am_path* p = NULL;
  double ev3[3];
  EXPECT(am_path_pspin(2, 1, 1.0, 2, &p) == AM_OK);
  EXPECT(am_path_eigenvalues(p, 1.0, ev3) == AM_OK);
  EXPECT(near(ev3[0], -2, 1e-12) && near(ev3[1], 0, 1e-12) && near(ev3[2], 2, 1e-12));
  am_path_free(p);

  const double h0[4] = {1, 0, 0, -1}, h1[4] = {0, 1, 1, 0};
  am_path* lin = NULL;
  EXPECT(am_path_linear(2, h0, h1, &lin) == AM_OK);
  EXPECT(am_path_eigenvalues(lin, 0.5, ev) == AM_OK);
  EXPECT(near(ev[1], sqrt(0.5), 1e-12));
  am_path_free(lin);
}

static void fields(void) {
  am_path* g = NULL;
  am_field* f = NULL;
  double v = 0, grad[2], hess[4];
  am_path_grover(4, 0, &g);
  EXPECT(am_field_from_path(g, -0.25, 1.25, -0.5, 1.5, &f) == AM_OK);
  am_path_free(g); /* the field keeps the path alive */
  EXPECT(am_field_value(f, 0.5, 0.5, &v) == AM_OK);
  EXPECT(near(v, -1.0 / 16, 1e-14));
  EXPECT(am_field_gradient(f, 0.0, 0.0, grad) == AM_OK);
  EXPECT(near(grad[0], 0.75, 1e-12) && near(grad[1], -1.0, 1e-12));
  EXPECT(am_field_value(f, 3.0, 0.0, &v) == AM_DOMAIN_ERROR);
  am_field_free(f);

  const int i[2] = {0, 2}, j[2] = {2, 0};
  const double c[2] = {1, -1};
  EXPECT(am_field_polynomial(2, i, j, c, -1, 1, -1, 1, &f) == AM_OK);
  EXPECT(am_field_hessian(f, 0.2, 0.3, hess) == AM_OK);
  EXPECT(hess[0] == -2 && hess[3] == 2 && hess[1] == 0);
  am_field_free(f);
}

static void reports(void) {
  am_report* r = NULL;
  int n0 = -1, n1 = -1, n2 = -1;
  EXPECT(am_analyze("{\"model\": {\"kind\": \"grover\", \"N\": 4}}", 0, &r) == AM_OK);
  EXPECT(am_report_certified(r) == 1);
  EXPECT(strcmp(am_report_status(r), "certified") == 0);
  EXPECT(am_report_euler(r) == -1);
  EXPECT(am_report_counts(r, &n0, &n1, &n2) == AM_OK);
  EXPECT(n0 == 0 && n1 == 1 && n2 == 0);
  EXPECT(strstr(am_report_json(r), "\"euler\": -1") != NULL);

  char* diff = NULL;
  EXPECT(am_compare_reports(r, r, &diff) == AM_OK);
  EXPECT(diff != NULL && strstr(diff, "\"empty\": true") != NULL);
  am_string_free(diff);
  am_report_free(r);

  am_report* bad = NULL;
  EXPECT(am_analyze("{\"model\": {\"kind\": \"grover\", \"N\": 4}, \"typo\": 1}", 0, &bad) ==
         AM_INVALID_ARGUMENT);
  EXPECT(bad == NULL);
  EXPECT(strcmp(am_last_error_stage(), "config") == 0);

  EXPECT(am_analyze("{\"model\": {\"kind\": \"grover\", \"N\": 12}}", 0, &bad) ==
         AM_INVALID_ARGUMENT);
  EXPECT(strcmp(am_last_error_stage(), "path") == 0);
}

static void sweep(void) {
  const double grid[2] = {0.5, 1.0};
  char* csv = NULL;
  char* js = NULL;
  int pass = -1;
  EXPECT(am_pspin_sweep(1, 1, 2, grid, 2, &csv, &js, &pass) == AM_OK);
  EXPECT(pass == 1);
  EXPECT(csv != NULL && strncmp(csv, "b,", 2) == 0);
  EXPECT(js != NULL && strstr(js, "\"records\"") != NULL);
  am_string_free(csv);
  am_string_free(js);

  EXPECT(am_pspin_sweep(1, 1, 2, grid, 1, NULL, NULL, &pass) == AM_OK);
  EXPECT(pass == -1);
}

int main(void) {
  EXPECT(strlen(am_version()) > 0);
  EXPECT(strcmp(am_status_string(AM_OK), "ok") == 0);
  EXPECT(strcmp(am_status_string(AM_DIVERGENT_DELAY), am_status_string(AM_OK)) != 0);
  paths();
  fields();
  reports();
  sweep();
  if (failures) fprintf(stderr, "%d C API check(s) failed\n", failures);
  else printf("C API checks passed\n");
  return failures ? 1 : 0;
}
