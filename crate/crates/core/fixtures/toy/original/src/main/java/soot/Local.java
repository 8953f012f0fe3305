package soot;

/** A local variable, used within Body classes. */
public class Local {
    private String name;
    private Type type;

    /** Returns the name of this object. */
    public String getName() {
        String localName = name;
        if (localName == null) {
            throw new IllegalStateException("unnamed local");
        }
        return localName;
    }

    /** Sets the type of this local. */
    public void setType(Type t) {
        if (t == null) {
            throw new IllegalArgumentException("type must not be null");
        }
        this.type = t;
    }
}
