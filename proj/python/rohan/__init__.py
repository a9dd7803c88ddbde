"""Hand-detection dataset toolkit: glove augmentation, tracking-based
pseudo-label refinement and detection metrics."""

from ._rohan import (
    BBox,
    EvalReport,
    FrameDetections,
    ToolkitError,
    Track,
    TrackObservation,
    apply_blood,
    assign,
    augment_dataset,
    average_precision,
    bbox_from_mask,
    connected_component_boxes,
    evaluate,
    iou,
    load_yolo,
    match_detections,
    overlay_glove,
    run_tracker,
    save_yolo,
    spatial_filter,
    synth_blood_mask,
    to_normalized,
    to_pixel,
    track_length_filter,
)

__all__ = [
    "BBox",
    "EvalReport",
    "FrameDetections",
    "ToolkitError",
    "Track",
    "TrackObservation",
    "apply_blood",
    "assign",
    "augment_dataset",
    "average_precision",
    "bbox_from_mask",
    "connected_component_boxes",
    "evaluate",
    "iou",
    "load_yolo",
    "match_detections",
    "overlay_glove",
    "run_tracker",
    "save_yolo",
    "spatial_filter",
    "synth_blood_mask",
    "to_normalized",
    "to_pixel",
    "track_length_filter",
]
