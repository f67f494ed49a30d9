#include <stdio.h>
#include <string.h>
#include "ulef.h"

int main(void) {
    UlefGroup *g = NULL;
    if (ulef_group_new("F_2", &g) != ULEF_STATUS_OK) return 10;
    size_t n = 0;
    if (ulef_group_ball_size(g, 2, &n) != ULEF_STATUS_OK || n != 17) return 11;
    char *cert = NULL;
    if (ulef_decide_class(g, "{\"constant\": 5}", &cert) != ULEF_STATUS_OK) return 12;
    int ok = strstr(cert, "zero-by-truncated-flow") != NULL;
    ulef_string_free(cert);
    ulef_group_free(g);
    if (!ok) return 13;
    if (ulef_group_new(NULL, &g) != ULEF_STATUS_NULL_POINTER || ulef_last_error() == NULL) return 14;
    printf("ok %s\n", ulef_version());
    return 0;
}
