package soot;

import java.util.HashMap;
import java.util.Map;

/** Manages the Packs containing the various phases and their options. */
public class PackManager {
    private final Map<String, Pack> packNameToPack = new HashMap<>();

    /** Runs every enabled pack over the classes of the scene. */
    public void runPacks() {
        for (Pack pack : packNameToPack.values()) {
            // packs run in registration order
            if (PhaseOptions.getBoolean(pack.getOptions(), "enabled")) {
                pack.apply();
            }
        }
    }

    /** Looks a pack up by its phase name. */
    public Pack getPack(String phaseName) {
        Pack found = packNameToPack.get(phaseName);
        if (found == null) {
            throw new RuntimeException("unknown pack " + phaseName);
        }
        return found;
    }
}
