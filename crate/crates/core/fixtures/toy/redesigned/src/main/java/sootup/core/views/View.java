package sootup.core.views;

import java.util.Collection;
import java.util.Optional;

/** A View is essentially a collection of code belonging to a project. */
public class View {
    private final Map<ClassType, SootClass> cache = new HashMap<>();

    /** Returns all classes of this view. */
    public Collection<SootClass> getClasses() {
        Collection<SootClass> all = cache.values();
        // a view never exposes its cache directly
        return Collections.unmodifiableCollection(all);
    }

    /** Looks a class up by its type. */
    public Optional<SootClass> getClass(ClassType type) {
        SootClass cached = cache.get(type);
        if (cached == null) {
            return Optional.empty();
        }
        return Optional.of(cached);
    }
}
