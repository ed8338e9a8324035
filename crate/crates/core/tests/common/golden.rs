// Transcribed main-table rows: (method, [hlr, ior, lrs] per ipc 1/10/50).
pub const CIFAR10_MAIN: &[(&str, [f64; 9])] = &[
    ("DC", [52.7, 12.4, 19.1, 36.7, 18.5, 23.2, 26.3, 12.3, 24.0]),
    (
        "DSA",
        [58.9, 13.2, 18.2, 35.1, 19.6, 23.7, 27.4, 11.0, 23.5],
    ),
    (
        "MTT",
        [42.2, 27.6, 23.9, 23.7, 30.9, 28.4, 16.5, 20.5, 27.8],
    ),
    ("DM", [61.4, 8.7, 17.0, 39.4, 16.1, 22.2, 25.1, 12.7, 24.3]),
    (
        "DATADAM",
        [49.9, 15.6, 20.0, 34.8, 19.9, 23.8, 21.9, 15.8, 25.6],
    ),
    (
        "DATM",
        [41.9, 30.8, 24.6, 26.8, 35.1, 28.7, 18.9, 23.9, 28.0],
    ),
    (
        "SRe2L",
        [69.9, -0.3, 14.3, 67.8, -5.7, 13.8, 62.9, -6.5, 14.4],
    ),
    ("RDED", [60.6, 2.4, 16.2, 50.7, 1.1, 17.6, 36.0, -1.6, 19.6]),
    ("D4M", [51.1, 6.7, 18.4, 39.9, 9.1, 20.8, 27.0, 6.6, 22.8]),
];
pub const CIFAR100_MAIN: &[(&str, [f64; 9])] = &[
    ("DC", [39.4, 8.4, 20.8, 25.5, 12.7, 24.2, 21.8, 1.1, 22.7]),
    ("DSA", [46.0, 8.5, 19.6, 26.1, 13.5, 24.3, 21.2, 2.0, 23.0]),
    (
        "MTT",
        [35.2, 16.7, 23.1, 18.0, 20.7, 27.5, 12.1, 11.6, 26.8],
    ),
    ("DM", [48.0, 6.1, 18.9, 30.1, 10.7, 23.0, 16.6, 7.2, 24.9]),
    (
        "DATADAM",
        [45.2, 9.1, 19.9, 25.9, 14.8, 24.6, 12.4, 11.8, 26.8],
    ),
    (
        "DATM",
        [24.1, 18.5, 25.7, 18.9, 18.4, 26.8, 10.3, 26.1, 30.4],
    ),
    (
        "SRe2L",
        [52.7, -1.9, 16.7, 50.5, -14.8, 15.0, 46.2, -11.5, 16.2],
    ),
    (
        "RDED",
        [45.6, -0.5, 18.1, 37.5, -1.2, 19.4, 27.3, -1.5, 21.2],
    ),
    ("D4M", [30.9, 10.0, 22.7, 40.1, 9.7, 20.9, 26.7, 13.5, 24.2]),
];
pub const TINY_MAIN: &[(&str, [f64; 9])] = &[
    ("DC", [28.6, 3.9, 22.0, 21.5, 7.1, 23.9, 21.3, -2.1, 22.2]),
    ("DSA", [30.3, 3.7, 21.6, 20.3, 6.8, 24.1, 17.6, 7.6, 25.8]),
    ("MTT", [30.7, 5.8, 21.9, 15.6, 14.6, 26.7, 15.6, 10.2, 26.4]),
    ("DM", [36.7, 2.3, 20.2, 26.2, 7.5, 23.1, 18.9, 5.3, 24.1]),
    (
        "DATM",
        [25.4, 8.6, 23.5, 18.3, 14.2, 26.0, 13.5, 15.1, 27.2],
    ),
    ("EDF", [25.8, 9.2, 23.5, 18.5, 15.4, 26.2, 13.8, 15.9, 27.3]),
    (
        "SRe2L",
        [45.6, -1.8, 15.4, 43.6, -8.5, 17.1, 33.6, -9.6, 18.6],
    ),
    ("RDED", [34.0, 3.9, 21.0, 25.6, 1.8, 23.7, 15.2, -0.6, 23.7]),
    (
        "D4M",
        [40.6, -3.0, 18.6, 35.6, -5.8, 18.9, 27.7, 12.8, 23.8],
    ),
];
pub const IN1K_MAIN: &[(&str, [f64; 9])] = &[
    (
        "SRe2L",
        [56.3, -1.5, 16.2, 55.0, -15.6, 14.2, 53.4, -13.2, 14.8],
    ),
    (
        "RDED",
        [55.7, 1.6, 16.8, 50.2, -0.6, 17.4, 39.8, -3.6, 22.9],
    ),
    (
        "D4M",
        [55.9, -0.6, 15.6, 53.0, -7.7, 15.8, 43.7, -5.8, 17.6],
    ),
    (
        "DWA",
        [56.1, -1.2, 16.3, 54.4, -4.1, 16.1, 49.7, -7.8, 16.3],
    ),
    (
        "CDA",
        [56.2, -2.5, 16.1, 54.9, -8.6, 15.3, 52.0, -6.7, 16.1],
    ),
    (
        "EDC",
        [55.7, -0.8, 16.4, 52.0, -0.4, 17.1, 41.3, -0.1, 18.9],
    ),
    (
        "G-VBSM",
        [56.3, -1.2, 16.3, 55.0, -7.3, 15.5, 44.9, -5.9, 17.4],
    ),
];

// (method, [ior_naug, ior_aug, ars] per ipc 1/10/50).
pub const IN1K_ARS: &[(&str, [f64; 9])] = &[
    (
        "SRe2L",
        [-1.2, -1.5, 26.3, -4.4, -15.6, 22.9, -21.0, -13.2, 20.2],
    ),
    ("RDED", [0.8, 1.6, 27.4, 5.6, -0.6, 28.1, 2.0, -3.6, 26.7]),
    (
        "D4M",
        [-0.3, -0.6, 26.7, -0.5, -7.7, 25.2, -2.0, -5.8, 25.3],
    ),
    (
        "DWA",
        [-1.2, -1.2, 26.4, -4.0, -4.1, 25.2, -13.0, -7.8, 22.7],
    ),
    (
        "CDA",
        [-1.1, -2.5, 26.1, -4.9, -8.6, 24.1, -14.1, -6.7, 22.7],
    ),
    (
        "EDC",
        [-0.5, -0.8, 26.6, -0.3, -0.4, 26.8, -3.2, -0.1, 26.2],
    ),
    (
        "G-VBSM",
        [-1.2, -1.2, 26.4, -7.9, -7.3, 23.8, -18.0, -5.9, 22.1],
    ),
];

// LRS at lambda 0.1, 0.3, 0.5, 0.7, 0.9.
pub const CIFAR10_SWEEP_IPC1: &[(&str, [f64; 5])] = &[
    ("DC", [11.2, 14.9, 19.1, 24.0, 29.5]),
    ("DSA", [9.7, 13.7, 18.2, 23.5, 29.5]),
    ("MTT", [14.3, 18.7, 23.9, 29.8, 36.6]),
    ("DM", [9.0, 12.8, 17.0, 22.0, 27.6]),
    ("DATADAM", [11.9, 15.8, 20.2, 25.2, 30.9]),
    ("DATM", [14.4, 19.2, 24.6, 30.9, 38.2]),
    ("SRe2L", [7.0, 10.4, 14.3, 18.8, 23.9]),
    ("RDED", [9.1, 12.4, 16.2, 20.4, 25.3]),
    ("D4M", [11.4, 14.7, 18.4, 22.6, 27.3]),
];
pub const CIFAR10_SWEEP_IPC10: &[(&str, [f64; 5])] = &[
    ("DC", [15.5, 19.1, 23.2, 27.7, 32.8]),
    ("DSA", [16.0, 19.6, 23.7, 28.3, 33.4]),
    ("MTT", [19.8, 23.9, 28.5, 33.5, 39.2]),
    ("DM", [14.7, 18.2, 22.2, 26.7, 31.6]),
    ("DATADAM", [16.1, 19.7, 23.8, 28.4, 33.5]),
    ("DATM", [19.0, 23.5, 28.7, 34.5, 41.2]),
    ("SRe2L", [7.3, 10.4, 13.8, 17.7, 22.1]),
    ("RDED", [11.3, 14.3, 17.5, 21.2, 25.2]),
    ("D4M", [14.3, 17.4, 20.8, 24.6, 28.7]),
];
pub const CIFAR10_SWEEP_IPC50: &[(&str, [f64; 5])] = &[
    ("DC", [18.3, 21.1, 24.0, 27.2, 30.6]),
    ("DSA", [18.0, 20.6, 23.5, 26.7, 30.1]),
    ("MTT", [21.8, 24.7, 27.8, 31.1, 34.7]),
    ("DM", [18.7, 21.4, 24.3, 27.5, 30.9]),
    ("DATADAM", [19.8, 22.6, 25.6, 28.8, 32.3]),
    ("DATM", [21.1, 24.4, 28.0, 31.9, 36.1]),
    ("SRe2L", [8.3, 11.2, 14.4, 18.0, 22.0]),
    ("RDED", [15.1, 17.3, 19.6, 22.1, 24.8]),
    ("D4M", [17.9, 20.3, 22.8, 25.4, 28.3]),
];
pub const CIFAR100_SWEEP_IPC1: &[(&str, [f64; 5])] = &[
    ("DC", [14.4, 17.5, 20.8, 24.4, 28.5]),
    ("DSA", [12.7, 16.0, 19.6, 23.7, 28.2]),
    ("MTT", [15.9, 19.3, 23.1, 27.4, 32.1]),
    ("DM", [12.1, 15.3, 18.9, 22.8, 27.2]),
    ("DATADAM", [12.9, 16.2, 19.9, 23.9, 28.5]),
    ("DATM", [19.2, 22.3, 25.7, 29.4, 33.4]),
    ("SRe2L", [10.8, 13.6, 16.7, 20.2, 24.0]),
    ("RDED", [12.6, 15.2, 18.1, 21.3, 24.8]),
    ("D4M", [16.9, 19.7, 22.7, 25.9, 29.5]),
];
pub const CIFAR100_SWEEP_IPC10: &[(&str, [f64; 5])] = &[
    ("DC", [18.6, 21.3, 24.3, 27.4, 30.8]),
    ("DSA", [18.4, 21.3, 24.3, 27.6, 31.2]),
    ("MTT", [21.3, 24.3, 27.5, 30.9, 34.7]),
    ("DM", [17.1, 19.9, 23.0, 26.2, 29.8]),
    ("DATADAM", [18.6, 21.5, 24.6, 28.0, 31.7]),
    ("DATM", [20.9, 23.7, 26.8, 30.1, 33.6]),
    ("SRe2L", [11.0, 12.9, 15.0, 17.3, 19.8]),
    ("RDED", [14.7, 17.0, 19.4, 22.0, 24.9]),
    ("D4M", [14.3, 17.4, 20.9, 24.7, 29.0]),
];
pub const CIFAR100_SWEEP_IPC50: &[(&str, [f64; 5])] = &[
    ("DC", [19.4, 21.0, 22.7, 24.5, 26.4]),
    ("DSA", [19.6, 21.2, 23.0, 24.8, 26.8]),
    ("MTT", [22.9, 24.8, 26.8, 28.8, 31.0]),
    ("DM", [21.3, 23.1, 24.9, 26.9, 29.0]),
    ("DATADAM", [22.9, 24.8, 26.8, 28.9, 31.1]),
    ("DATM", [24.2, 27.2, 30.4, 33.9, 37.6]),
    ("SRe2L", [12.1, 14.1, 16.2, 18.5, 21.0]),
    ("RDED", [17.6, 19.3, 21.2, 23.1, 25.2]),
    ("D4M", [18.3, 21.1, 24.2, 27.5, 31.1]),
];
pub const TINY_SWEEP_IPC1: &[(&str, [f64; 5])] = &[
    ("DC", [17.4, 19.6, 22.0, 24.5, 27.2]),
    ("DSA", [16.9, 19.1, 21.6, 24.2, 27.0]),
    ("MTT", [16.8, 19.3, 21.9, 24.8, 27.8]),
    ("DM", [15.0, 17.5, 20.2, 23.1, 26.2]),
    ("DATM", [18.5, 20.9, 23.5, 26.2, 29.2]),
    ("EDF", [18.4, 20.9, 23.5, 26.3, 29.4]),
    ("SRe2L", [12.5, 15.1, 17.9, 21.0, 24.3]),
    ("RDED", [15.8, 18.3, 20.9, 23.8, 26.9]),
    ("D4M", [13.8, 16.1, 18.6, 21.2, 24.1]),
];
pub const TINY_SWEEP_IPC10: &[(&str, [f64; 5])] = &[
    ("DC", [19.7, 21.7, 23.9, 26.3, 28.7]),
    ("DSA", [20.0, 22.0, 24.1, 26.3, 28.7]),
    ("MTT", [21.9, 24.2, 26.7, 29.3, 32.1]),
    ("DM", [18.2, 20.6, 23.1, 25.8, 28.7]),
    ("DATM", [20.9, 23.4, 26.0, 28.8, 31.8]),
    ("EDF", [20.9, 23.5, 26.2, 29.2, 32.3]),
    ("SRe2L", [12.8, 14.9, 17.1, 19.5, 22.1]),
    ("RDED", [18.2, 20.1, 22.1, 24.2, 26.5]),
    ("D4M", [15.1, 16.9, 18.9, 21.1, 23.3]),
];
pub const TINY_SWEEP_IPC50: &[(&str, [f64; 5])] = &[
    ("DC", [19.4, 20.8, 22.2, 23.7, 25.2]),
    ("DSA", [20.9, 22.8, 24.8, 26.9, 29.1]),
    ("MTT", [21.7, 23.7, 25.8, 28.0, 30.3]),
    ("DM", [20.4, 22.2, 24.1, 26.1, 28.1]),
    ("DATM", [22.6, 24.9, 27.2, 29.8, 32.4]),
    ("EDF", [22.5, 24.9, 27.3, 30.0, 32.8]),
    ("SRe2L", [15.5, 17.0, 18.6, 20.3, 22.1]),
    ("RDED", [21.4, 22.5, 23.7, 24.8, 26.0]),
    ("D4M", [17.9, 20.8, 23.8, 27.2, 30.8]),
];
pub const IN1K_SWEEP_IPC1: &[(&str, [f64; 5])] = &[
    ("SRe2L", [9.9, 12.9, 16.2, 19.9, 24.0]),
    ("RDED", [10.2, 13.3, 16.8, 20.8, 25.2]),
    ("D4M", [10.1, 13.1, 16.4, 20.2, 24.4]),
    ("DWA", [10.0, 13.0, 16.3, 20.0, 24.1]),
    ("CDA", [9.9, 12.8, 16.1, 19.7, 23.7]),
    ("EDC", [10.1, 13.1, 16.4, 20.1, 24.3]),
    ("G-VBSM", [10.0, 12.9, 16.3, 20.0, 24.1]),
];
pub const IN1K_SWEEP_IPC10: &[(&str, [f64; 5])] = &[
    ("SRe2L", [9.9, 12.0, 14.2, 16.7, 19.3]),
    ("RDED", [11.4, 14.2, 17.4, 20.8, 24.6]),
    ("D4M", [10.6, 13.0, 15.8, 18.7, 22.0]),
    ("DWA", [10.3, 13.1, 16.1, 19.5, 23.2]),
    ("CDA", [10.1, 12.6, 15.3, 18.3, 21.6]),
    ("EDC", [11.0, 13.9, 17.1, 20.6, 24.6]),
    ("G-VBSM", [10.1, 12.7, 15.5, 18.6, 22.1]),
];
pub const IN1K_SWEEP_IPC50: &[(&str, [f64; 5])] = &[
    ("SRe2L", [10.3, 12.5, 14.8, 17.4, 20.2]),
    ("RDED", [14.0, 16.2, 18.6, 21.2, 23.9]),
    ("D4M", [12.9, 15.1, 17.6, 20.2, 23.0]),
    ("DWA", [11.3, 13.7, 16.3, 19.1, 22.1]),
    ("CDA", [10.8, 13.3, 16.1, 19.1, 22.4]),
    ("EDC", [13.7, 16.2, 18.9, 21.9, 25.1]),
    ("G-VBSM", [12.6, 14.9, 17.4, 20.0, 22.9]),
];
